use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{sobol_points, SamplingError};
use crate::scenario::{validate_factors, Factor, Recipe};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignKind {
    Oat,
    Saltelli,
    Grid,
}

/// Run ids of one factor's OAT triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OatTriple {
    pub factor: String,
    pub base_run: u64,
    pub min_run: u64,
    pub max_run: u64,
}

/// A contiguous block of `n` rows in a Saltelli design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaltelliBlock {
    /// `A`, `B`, `AB_<i>` or `BA_<i>` (zero-based factor index).
    pub label: String,
    pub start: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub values: Vec<f64>,
}

/// Design-specific bookkeeping that analysis relies on to interpret outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DesignMeta {
    Oat {
        triples: Vec<OatTriple>,
    },
    Saltelli {
        n: usize,
        k: usize,
        second_order: bool,
        skip: u64,
        blocks: Vec<SaltelliBlock>,
    },
    Grid {
        axes: Vec<GridAxis>,
        points_per_axis: usize,
    },
}

impl DesignMeta {
    /// Expected number of recipes for this layout.
    pub fn run_count(&self) -> usize {
        match self {
            DesignMeta::Oat { triples } => 1 + 2 * triples.len(),
            DesignMeta::Saltelli { n, blocks, .. } => n * blocks.len(),
            DesignMeta::Grid { axes, points_per_axis } => points_per_axis.pow(axes.len() as u32),
        }
    }
}

/// An ordered list of recipes plus the layout needed to analyse their outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignDesign {
    pub kind: DesignKind,
    pub factors: Vec<Factor>,
    pub recipes: Vec<Recipe>,
    pub meta: DesignMeta,
}

impl CampaignDesign {
    pub fn len(&self) -> usize {
        self.recipes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.recipes.is_empty()
    }

    /// Checks that the recipes agree with the recorded layout.
    pub fn validate(&self) -> Result<(), SamplingError> {
        validate_factors(&self.factors)?;
        if self.recipes.len() != self.meta.run_count() {
            return Err(SamplingError::Layout(format!(
                "{} recipes, layout expects {}",
                self.recipes.len(),
                self.meta.run_count()
            )));
        }
        for (i, r) in self.recipes.iter().enumerate() {
            if r.run_id != i as u64 {
                return Err(SamplingError::Layout(format!("recipe {i} has run_id {}", r.run_id)));
            }
            r.check_bounds(&self.factors)?;
        }
        Ok(())
    }

    pub fn factor_names(&self) -> Vec<&str> {
        self.factors.iter().map(|f| f.name.as_str()).collect()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), SamplingError> {
        let text = serde_json::to_string_pretty(self).map_err(crate::scenario::ScenarioError::from)?;
        std::fs::write(path, text + "\n").map_err(crate::scenario::ScenarioError::from)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SamplingError> {
        let text = std::fs::read_to_string(path).map_err(crate::scenario::ScenarioError::from)?;
        let design: Self = serde_json::from_str(&text).map_err(crate::scenario::ScenarioError::from)?;
        design.validate()?;
        Ok(design)
    }
}

fn base_recipe(factors: &[Factor], run_id: u64, tag: String) -> Recipe {
    let mut r = Recipe::new(run_id, tag);
    for f in factors {
        r.assignments.insert(f.name.clone(), f.base);
    }
    r
}

fn checked_factors(factors: &[Factor]) -> Result<(), SamplingError> {
    if factors.is_empty() {
        return Err(SamplingError::NoFactors);
    }
    validate_factors(factors)?;
    Ok(())
}

/// One-factor-at-a-time design: a shared base run followed by a
/// (min, max) pair per factor.
pub fn oat_design(factors: &[Factor]) -> Result<CampaignDesign, SamplingError> {
    checked_factors(factors)?;
    let mut recipes = vec![base_recipe(factors, 0, "oat:base".into())];
    let mut triples = Vec::with_capacity(factors.len());
    for f in factors {
        let min_run = recipes.len() as u64;
        let mut lo = base_recipe(factors, min_run, format!("oat:{}:min", f.name));
        lo.assignments.insert(f.name.clone(), f.min);
        let mut hi = base_recipe(factors, min_run + 1, format!("oat:{}:max", f.name));
        hi.assignments.insert(f.name.clone(), f.max);
        recipes.push(lo);
        recipes.push(hi);
        triples.push(OatTriple {
            factor: f.name.clone(),
            base_run: 0,
            min_run,
            max_run: min_run + 1,
        });
    }
    Ok(CampaignDesign {
        kind: DesignKind::Oat,
        factors: factors.to_vec(),
        recipes,
        meta: DesignMeta::Oat { triples },
    })
}

/// Saltelli sample matrices `A`, `B`, `AB_i` (and `BA_i` when
/// `second_order`), laid out block after block, each block `n` rows.
///
/// `A` and `B` are the two halves of a `2k`-dimensional Sobol sequence.
/// The all-zeros point is always dropped: rows come from raw indices
/// `1 + skip ..= n + skip`.
pub fn saltelli_design(
    factors: &[Factor],
    n: usize,
    second_order: bool,
    skip: u64,
) -> Result<CampaignDesign, SamplingError> {
    checked_factors(factors)?;
    if n == 0 {
        return Err(SamplingError::Layout("base sample count must be positive".into()));
    }
    if !n.is_power_of_two() {
        log::warn!("Saltelli base sample count {n} is not a power of two; Sobol balance properties are lost");
    }
    let k = factors.len();
    let points = sobol_points(2 * k, n, skip)?;

    let mut blocks = vec![
        SaltelliBlock { label: "A".into(), start: 0 },
        SaltelliBlock { label: "B".into(), start: n },
    ];
    for i in 0..k {
        blocks.push(SaltelliBlock { label: format!("AB_{i}"), start: (2 + i) * n });
    }
    if second_order {
        for i in 0..k {
            blocks.push(SaltelliBlock { label: format!("BA_{i}"), start: (2 + k + i) * n });
        }
    }

    let mut recipes = Vec::with_capacity(n * blocks.len());
    for block in &blocks {
        let (source, swap): (usize, Option<usize>) = match block.label.as_str() {
            "A" => (0, None),
            "B" => (1, None),
            l if l.starts_with("AB_") => (0, Some(l[3..].parse().expect("AB index"))),
            l => (1, Some(l[3..].parse().expect("BA index"))),
        };
        for (row, p) in points.iter().enumerate() {
            let run_id = recipes.len() as u64;
            let mut r = Recipe::new(run_id, format!("saltelli:{}:{row}", block.label));
            for (j, f) in factors.iter().enumerate() {
                // column j of A is p[j], of B is p[k + j]; swap takes it from the other matrix
                let from = if swap == Some(j) { 1 - source } else { source };
                let u = p[from * k + j];
                r.assignments.insert(f.name.clone(), f.scale_unit(u));
            }
            recipes.push(r);
        }
    }

    Ok(CampaignDesign {
        kind: DesignKind::Saltelli,
        factors: factors.to_vec(),
        recipes,
        meta: DesignMeta::Saltelli { n, k, second_order, skip, blocks },
    })
}

/// `points` equally spaced values from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    let last = (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { max } else { min + (max - min) * i as f64 / last })
        .collect()
}

/// Dense inclusive grid over one or two axes; other factors stay at base.
/// Two axes are enumerated row-major (first axis outer).
pub fn grid_design(factors: &[Factor], axes: &[&str], points_per_axis: usize) -> Result<CampaignDesign, SamplingError> {
    checked_factors(factors)?;
    if axes.is_empty() || axes.len() > 2 {
        return Err(SamplingError::AxisCount(axes.len()));
    }
    if points_per_axis < 2 {
        return Err(SamplingError::TooFewPoints(points_per_axis));
    }
    if axes.len() == 2 && axes[0] == axes[1] {
        return Err(SamplingError::Layout(format!("axis {:?} given twice", axes[0])));
    }
    let grid_axes: Vec<GridAxis> = axes
        .iter()
        .map(|name| {
            let f = factors
                .iter()
                .find(|f| f.name == *name)
                .ok_or_else(|| SamplingError::UnknownAxis(name.to_string()))?;
            Ok(GridAxis {
                name: f.name.clone(),
                min: f.min,
                max: f.max,
                values: linspace(f.min, f.max, points_per_axis),
            })
        })
        .collect::<Result<_, SamplingError>>()?;

    let mut index_tuples: Vec<Vec<usize>> = vec![vec![]];
    for _ in &grid_axes {
        index_tuples = index_tuples
            .into_iter()
            .flat_map(|t| {
                (0..points_per_axis).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }

    let recipes = index_tuples
        .iter()
        .enumerate()
        .map(|(run, idx)| {
            let tag = idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
            let mut r = base_recipe(factors, run as u64, format!("grid:{tag}"));
            for (axis, &i) in grid_axes.iter().zip(idx) {
                r.assignments.insert(axis.name.clone(), axis.values[i]);
            }
            r
        })
        .collect();

    Ok(CampaignDesign {
        kind: DesignKind::Grid,
        factors: factors.to_vec(),
        recipes,
        meta: DesignMeta::Grid { axes: grid_axes, points_per_axis },
    })
}
