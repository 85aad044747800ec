//! Multi-energy benchmark workbench.
//!
//! A coupled low-voltage feeder and district-heating branch with a
//! power-to-heat facility (heat pump plus stratified hot-water tank),
//! together with the tooling used to study how the facility scales:
//! experiment designs (OAT, Saltelli, grids), a deterministic campaign
//! runner, Sobol sensitivity indices with bootstrap intervals, OAT
//! rankings and polynomial meta-models.
//!
//! The crate is organised bottom-up:
//!
//! - [`scenario`]: factors, recipes, benchmark configuration and profiles
//! - [`sampling`]: Sobol sequence and experiment designs
//! - [`sim`]: power flow, thermal network, heat pump, tank, coupled simulation
//! - [`control`]: voltage-based power limiting and the flex-heat state machine
//! - [`metrics`]: per-run target metrics
//! - [`analysis`]: Sobol indices, OAT ranking, meta-models
//! - [`campaign`]: batch execution, result files and plots

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod campaign;
pub mod control;
pub mod metrics;
pub mod par;
pub mod sampling;
pub mod scenario;
pub mod sim;

pub use analysis::{MetaModel, OatRanking, SobolResult};
pub use campaign::{run_campaign, CampaignOptions, CampaignResult};
pub use control::{FlexHeatState, Mode, VoltageControllerConfig};
pub use metrics::{compute_metrics, MetricSet};
pub use sampling::{CampaignDesign, DesignKind};
pub use scenario::{BenchmarkConfig, Factor, FactorKind, Profiles, Recipe};
pub use sim::{simulate, Trajectory};

/// Specific heat capacity of water, J/(kg·K).
pub const WATER_CP: f64 = 4186.0;

/// Density of water used for tank mass, kg/m³.
pub const WATER_DENSITY: f64 = 1000.0;
