//! Benchmark controllers.
//!
//! Two pure transition functions: proportional voltage-based limiting of
//! the heat-pump power, and the flex-heat supervisor that chooses between
//! grid-only supply, charging the tank from PV surplus, and discharging
//! the tank into the heating network. State is carried by the caller.

use serde::{Deserialize, Serialize};

use crate::scenario::BenchmarkConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoltageControllerConfig {
    /// Proportional gain, 1/pu.
    pub kp: f64,
    pub v_ref_pu: f64,
    pub p_rated_kw: f64,
}

impl VoltageControllerConfig {
    pub fn from_config(cfg: &BenchmarkConfig) -> Self {
        Self {
            kp: cfg.control.kp,
            v_ref_pu: cfg.control.v_ref_pu,
            p_rated_kw: cfg.heat_pump.rated_power_kw,
        }
    }
}

/// Heat-pump power limit for a measured bus voltage.
///
/// `P_rated · clamp(1 − K_p · max(0, V_ref − V), 0, 1)`: no curtailment at or
/// above the reference, linear curtailment below it.
pub fn voltage_power_limit(v_meas_pu: f64, cfg: &VoltageControllerConfig) -> f64 {
    let deficit = (cfg.v_ref_pu - v_meas_pu).max(0.0);
    cfg.p_rated_kw * (1.0 - cfg.kp * deficit).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Mode {
    GridOnly,
    Charge,
    Discharge,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::GridOnly => "GRID_ONLY",
            Mode::Charge => "CHARGE",
            Mode::Discharge => "DISCHARGE",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlexHeatThresholds {
    /// Charging is requested once the tank bottom falls below this.
    pub charge_start_c: f64,
    /// Charging stops once the tank bottom reaches this.
    pub charge_stop_c: f64,
    /// Discharge may start once the tank top reaches this.
    pub discharge_start_c: f64,
    /// Discharge stops once the tank top falls to this.
    pub discharge_stop_c: f64,
    /// PV surplus must exceed this to count.
    pub surplus_threshold_kw: f64,
}

impl FlexHeatThresholds {
    pub fn from_config(cfg: &BenchmarkConfig) -> Self {
        let c = &cfg.control;
        Self {
            charge_start_c: c.charge_start_c,
            charge_stop_c: c.charge_stop_c,
            discharge_start_c: c.discharge_start_c,
            discharge_stop_c: c.discharge_stop_c,
            surplus_threshold_kw: c.surplus_threshold_kw,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.charge_start_c < self.charge_stop_c && self.discharge_stop_c < self.discharge_start_c
    }
}

impl Default for FlexHeatThresholds {
    fn default() -> Self {
        Self {
            charge_start_c: 55.0,
            charge_stop_c: 70.0,
            discharge_start_c: 70.0,
            discharge_stop_c: 60.0,
            surplus_threshold_kw: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlexHeatState {
    pub mode: Mode,
    /// Hysteresis latch on the tank bottom: set below `charge_start_c`,
    /// cleared at `charge_stop_c`.
    pub charge_requested: bool,
    pub thresholds: FlexHeatThresholds,
}

impl FlexHeatState {
    pub fn new(thresholds: FlexHeatThresholds) -> Self {
        Self {
            mode: Mode::GridOnly,
            charge_requested: false,
            thresholds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlexHeatInput {
    pub t_top_c: f64,
    pub t_bottom_c: f64,
    pub pv_surplus_kw: f64,
    pub p_limit_kw: f64,
    pub hp_min_op_kw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlexHeatOutput {
    pub hp_setpoint_kw: f64,
    pub discharge_enable: bool,
}

/// One supervisor step. Returns the successor state and the outputs of the
/// successor mode.
///
/// Transitions:
///
/// | from | to | guard |
/// |------|----|-------|
/// | GRID_ONLY | CHARGE | charge requested, `T_bottom < charge_stop`, usable surplus, `min(surplus, P_limit) ≥ min_op` |
/// | GRID_ONLY | DISCHARGE | `T_top ≥ discharge_start` and no usable surplus |
/// | CHARGE | GRID_ONLY | `T_bottom ≥ charge_stop` or `min(surplus, P_limit) < min_op` |
/// | DISCHARGE | GRID_ONLY | `T_top ≤ discharge_stop` |
///
/// Anything else keeps the current mode. Charging has priority over
/// discharging when both guards hold.
pub fn flex_heat_step(state: &FlexHeatState, input: &FlexHeatInput) -> (FlexHeatState, FlexHeatOutput) {
    let th = &state.thresholds;
    let charge_requested = if input.t_bottom_c < th.charge_start_c {
        true
    } else if input.t_bottom_c >= th.charge_stop_c {
        false
    } else {
        state.charge_requested
    };

    let surplus = input.pv_surplus_kw.max(0.0);
    let has_surplus = surplus > th.surplus_threshold_kw && surplus >= input.hp_min_op_kw && surplus > 0.0;
    let charge_setpoint = surplus.min(input.p_limit_kw.max(0.0));
    let can_run = charge_setpoint > 0.0 && charge_setpoint >= input.hp_min_op_kw;

    let mode = match state.mode {
        Mode::GridOnly => {
            if charge_requested && has_surplus && input.t_bottom_c < th.charge_stop_c && can_run {
                Mode::Charge
            } else if input.t_top_c >= th.discharge_start_c && !has_surplus {
                Mode::Discharge
            } else {
                Mode::GridOnly
            }
        }
        Mode::Charge => {
            if input.t_bottom_c >= th.charge_stop_c || !can_run {
                Mode::GridOnly
            } else {
                Mode::Charge
            }
        }
        Mode::Discharge => {
            if input.t_top_c <= th.discharge_stop_c {
                Mode::GridOnly
            } else {
                Mode::Discharge
            }
        }
    };

    let output = match mode {
        Mode::GridOnly => FlexHeatOutput { hp_setpoint_kw: 0.0, discharge_enable: false },
        Mode::Charge => FlexHeatOutput { hp_setpoint_kw: charge_setpoint, discharge_enable: false },
        Mode::Discharge => FlexHeatOutput { hp_setpoint_kw: 0.0, discharge_enable: true },
    };
    (
        FlexHeatState { mode, charge_requested, thresholds: state.thresholds },
        output,
    )
}
