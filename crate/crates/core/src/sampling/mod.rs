//! Experiment designs: OAT screening, Saltelli matrices on a Sobol
//! sequence, and dense grids for meta-modelling.

mod design;
mod sobol;

use thiserror::Error;

pub use design::{
    grid_design, linspace, oat_design, saltelli_design, CampaignDesign, DesignKind, DesignMeta, GridAxis,
    OatTriple, SaltelliBlock,
};
pub use sobol::{max_dimension, sobol_points, sobol_points_raw, SobolSequence};

use crate::scenario::ScenarioError;

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("design needs at least one factor")]
    NoFactors,
    #[error("Sobol dimension must be at least 1")]
    ZeroDimension,
    #[error("Sobol dimension {dim} exceeds the direction-number table ({max})")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("Sobol index {0} exceeds 2^32")]
    IndexOverflow(u64),
    #[error("grid needs 1 or 2 axes, got {0}")]
    AxisCount(usize),
    #[error("grid needs at least 2 points per axis, got {0}")]
    TooFewPoints(usize),
    #[error("unknown grid axis {0:?}")]
    UnknownAxis(String),
    #[error("design layout mismatch: {0}")]
    Layout(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}
