use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ScenarioError;

/// Whether a factor is something the designer chooses or something the
/// environment imposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorKind {
    Design,
    Scenario,
}

/// A named scalar knob with a closed range and a base value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub name: String,
    pub kind: FactorKind,
    pub min: f64,
    pub max: f64,
    pub base: f64,
    #[serde(default)]
    pub unit: String,
}

impl Factor {
    pub fn new(name: &str, kind: FactorKind, min: f64, max: f64, base: f64, unit: &str) -> Self {
        Self {
            name: name.to_string(),
            kind,
            min,
            max,
            base,
            unit: unit.to_string(),
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let finite = self.min.is_finite() && self.max.is_finite() && self.base.is_finite();
        if self.name.is_empty() || !finite || !(self.min <= self.base && self.base <= self.max) {
            return Err(ScenarioError::InvalidFactor {
                name: self.name.clone(),
                reason: format!(
                    "expected min <= base <= max, got min={} base={} max={}",
                    self.min, self.base, self.max
                ),
            });
        }
        Ok(())
    }

    pub fn contains(&self, value: f64) -> bool {
        self.min <= value && value <= self.max
    }

    /// Maps `u` in `[0, 1]` linearly onto `[min, max]`.
    pub fn scale_unit(&self, u: f64) -> f64 {
        let v = self.min + u * (self.max - self.min);
        v.clamp(self.min, self.max)
    }
}

/// Validates a factor set: every factor well formed, names unique.
pub fn validate_factors(factors: &[Factor]) -> Result<(), ScenarioError> {
    let mut seen = HashSet::new();
    for f in factors {
        f.validate()?;
        if !seen.insert(f.name.as_str()) {
            return Err(ScenarioError::InvalidFactor {
                name: f.name.clone(),
                reason: "duplicate factor name".into(),
            });
        }
    }
    Ok(())
}

pub fn parse_factors(json: &str) -> Result<Vec<Factor>, ScenarioError> {
    let factors: Vec<Factor> = serde_json::from_str(json)?;
    validate_factors(&factors)?;
    Ok(factors)
}

/// Reads and validates a `factors.json` file.
pub fn load_factors(path: impl AsRef<Path>) -> Result<Vec<Factor>, ScenarioError> {
    let text = super::read_file(path.as_ref())?;
    parse_factors(&text)
}

pub fn write_factors(factors: &[Factor], path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    super::write_json(path.as_ref(), &factors)
}

/// The seven screening factors with their default ranges.
///
/// The diameter range is the one studied for tank sizing; the remaining
/// ranges are engineering defaults.
pub fn default_factors() -> Vec<Factor> {
    use FactorKind::*;
    vec![
        Factor::new("hwt_inner_diameter", Design, 1.0, 8.0, 4.0, "m"),
        Factor::new("hp_min_op", Design, 0.0, 50.0, 25.0, "kW"),
        Factor::new("kp", Design, 0.0, 40.0, 20.0, "1/pu"),
        Factor::new("pv_scaling", Scenario, 0.5, 2.0, 1.0, "-"),
        Factor::new("heat_profile_scaling", Scenario, 0.5, 2.0, 1.0, "-"),
        Factor::new("hp_power", Scenario, 50.0, 150.0, 100.0, "kW"),
        Factor::new("load_scaling", Scenario, 0.5, 2.0, 1.0, "-"),
    ]
}

/// Picks factors by name, in the requested order.
pub fn select_factors(factors: &[Factor], names: &[&str]) -> Result<Vec<Factor>, ScenarioError> {
    names
        .iter()
        .map(|n| {
            factors
                .iter()
                .find(|f| f.name == *n)
                .cloned()
                .ok_or_else(|| ScenarioError::UnknownFactor(n.to_string()))
        })
        .collect()
}
