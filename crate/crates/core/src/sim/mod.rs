//! Deterministic quasi-static simulator of the benchmark: radial LV feeder,
//! district-heating branch, heat pump and stratified tank.

mod heat_pump;
mod power_flow;
mod roots;
mod simulate;
mod tank;
mod thermal;
mod trajectory;

use thiserror::Error;

pub use heat_pump::{carnot_cop, heat_pump_step, HeatPumpError, HeatPumpOutput, COP_MAX, COP_MIN};
pub use power_flow::{
    solve_radial_power_flow, ElectricalState, Feeder, PowerFlowError, C64, MAX_ITERATIONS, TOLERANCE_PU,
};
pub use simulate::{simulate, simulate_with_profiles};
pub use tank::{mix_inversions, TankEnergy, TankError, TankGeometry, TankParams, TankState, MIN_SUBSTEP_S};
pub use thermal::{pipe_outlet_temperature, solve_thermal_network, TankInjection, ThermalError, ThermalState};
pub use trajectory::{StepRecord, Trajectory, TRAJECTORY_HEADER};

use crate::scenario::ScenarioError;

#[derive(Debug, Error)]
pub enum SimErrorKind {
    #[error(transparent)]
    Config(#[from] ScenarioError),
    #[error("profiles: {0}")]
    Profiles(String),
    #[error(transparent)]
    PowerFlow(#[from] PowerFlowError),
    #[error(transparent)]
    Thermal(#[from] ThermalError),
    #[error(transparent)]
    HeatPump(#[from] HeatPumpError),
    #[error(transparent)]
    Tank(#[from] TankError),
}

/// A simulation failure, tagged with the step it happened at (if any).
#[derive(Debug, Error)]
pub struct SimError {
    pub step: Option<usize>,
    pub kind: SimErrorKind,
}

impl SimError {
    fn setup(kind: SimErrorKind) -> Self {
        Self { step: None, kind }
    }

    pub fn is_validation(&self) -> bool {
        matches!(self.kind, SimErrorKind::Config(ref e) if e.is_validation())
    }
}

impl std::fmt::Display for SimError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.step {
            Some(k) => write!(f, "step {k}: {}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}
