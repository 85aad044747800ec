//! Factors, recipes, benchmark configuration and input profiles, plus the
//! JSON/CSV exchange formats that decouple design generation from simulation.

mod config;
mod factor;
mod profiles;
mod recipe;

use std::path::Path;

use serde::Serialize;
use thiserror::Error;

pub use config::{
    apply_recipe, is_bound_factor, tank_volume_m3, BenchmarkConfig, ControlConfig, ElectricalConfig,
    HeatPumpConfig, ProfileConfig, ProfileSource, SyntheticParams, TankConfig, ThermalConfig,
    FACTOR_BINDINGS,
};
pub use factor::{
    default_factors, load_factors, parse_factors, select_factors, validate_factors, write_factors, Factor,
    FactorKind,
};
pub use profiles::{load_profiles, synthetic, Profiles, CSV_HEADER};
pub use recipe::{read_recipe, read_recipes, recipes_from_json, recipes_to_json, write_recipes, Recipe};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV error: {0}")]
    Csv(String),
    #[error("invalid factor {name:?}: {reason}")]
    InvalidFactor { name: String, reason: String },
    #[error("unknown factor {0:?}")]
    UnknownFactor(String),
    #[error("run {run_id}: {name} = {value} outside [{min}, {max}]")]
    OutOfRange {
        run_id: u64,
        name: String,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("invalid config field {field}: {reason}")]
    InvalidConfig { field: String, reason: String },
    #[error("invalid profiles: {0}")]
    InvalidProfiles(String),
}

impl ScenarioError {
    /// True for errors caused by bad input values rather than I/O.
    pub fn is_validation(&self) -> bool {
        !matches!(self, ScenarioError::Io(_))
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, ScenarioError> {
    std::fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

pub(crate) fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), ScenarioError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
