use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Factor, ScenarioError};

/// A run-ready assignment of values to factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recipe {
    pub run_id: u64,
    #[serde(default)]
    pub design_tag: String,
    pub assignments: BTreeMap<String, f64>,
}

impl Recipe {
    pub fn new(run_id: u64, design_tag: impl Into<String>) -> Self {
        Self {
            run_id,
            design_tag: design_tag.into(),
            assignments: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.assignments.insert(name.to_string(), value);
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.assignments.get(name).copied()
    }

    /// Checks every assigned value against its factor's closed range.
    /// Names without a factor are left to [`super::apply_recipe`].
    pub fn check_bounds(&self, factors: &[Factor]) -> Result<(), ScenarioError> {
        for (name, &value) in &self.assignments {
            if let Some(f) = factors.iter().find(|f| &f.name == name) {
                if !f.contains(value) {
                    return Err(ScenarioError::OutOfRange {
                        run_id: self.run_id,
                        name: name.clone(),
                        value,
                        min: f.min,
                        max: f.max,
                    });
                }
            }
        }
        Ok(())
    }
}

pub fn recipes_to_json(recipes: &[Recipe]) -> Result<String, ScenarioError> {
    Ok(serde_json::to_string_pretty(recipes)?)
}

pub fn recipes_from_json(json: &str) -> Result<Vec<Recipe>, ScenarioError> {
    Ok(serde_json::from_str(json)?)
}

/// Writes `recipes.json`.
pub fn write_recipes(recipes: &[Recipe], path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    super::write_json(path.as_ref(), &recipes)
}

/// Reads `recipes.json`.
pub fn read_recipes(path: impl AsRef<Path>) -> Result<Vec<Recipe>, ScenarioError> {
    recipes_from_json(&super::read_file(path.as_ref())?)
}

/// Reads a single recipe object (as used by the `run` command).
pub fn read_recipe(path: impl AsRef<Path>) -> Result<Recipe, ScenarioError> {
    Ok(serde_json::from_str(&super::read_file(path.as_ref())?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_recipe_round_trip() {
        let r = vec![Recipe::new(0, "").with("kp", 2.0)];
        let back = recipes_from_json(&recipes_to_json(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn malformed_json_reports_line() {
        let err = recipes_from_json("[\n{\"run_id\": 0,\n  \"assignments\": {\"kp\": }\n}]").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn bounds_checked() {
        let f = [Factor::new("kp", super::super::FactorKind::Design, 0.0, 40.0, 20.0, "")];
        assert!(Recipe::new(1, "").with("kp", 40.0).check_bounds(&f).is_ok());
        assert!(Recipe::new(1, "").with("kp", 40.5).check_bounds(&f).is_err());
    }
}
