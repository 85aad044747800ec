use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::control::Mode;

/// Per-step record of a simulation run.
///
/// The first block of fields is what the trajectory CSV carries; the rest
/// is kept for conservation checks and diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub v1_pu: f64,
    pub v2_pu: f64,
    pub line0_loading_pct: f64,
    pub hp_p_el_kw: f64,
    pub hp_q_th_kw: f64,
    pub cop: f64,
    pub tank_top_c: f64,
    pub tank_bottom_c: f64,
    pub t_critical_c: f64,
    pub heat_ext_kw: f64,
    pub pv_kw: f64,
    pub export_kw: f64,
    pub mode: Mode,

    pub line1_loading_pct: f64,
    pub slack_import_kw: f64,
    pub consumer_load_kw: f64,
    pub losses_kw: f64,
    pub p_limit_kw: f64,
    pub heat_demand_kw: f64,
    pub tank_heat_kw: f64,
    pub pipe_losses_kw: f64,
    pub tank_stored_change_j: f64,
    pub tank_in_j: f64,
    pub tank_out_j: f64,
    pub tank_loss_j: f64,
    pub tank_charge_j: f64,
    pub tank_discharge_j: f64,
}

impl StepRecord {
    /// `PV + import − (loads + heat pump + losses)`, kW.
    pub fn electrical_residual_kw(&self) -> f64 {
        self.pv_kw + self.slack_import_kw - (self.consumer_load_kw + self.hp_p_el_kw + self.losses_kw)
    }

    pub fn electrical_scale_kw(&self) -> f64 {
        [self.pv_kw, self.slack_import_kw.abs(), self.consumer_load_kw, self.hp_p_el_kw, self.losses_kw]
            .into_iter()
            .fold(0.0, f64::max)
    }

    /// `external + tank − (demand + pipe losses)`, kW.
    pub fn thermal_residual_kw(&self) -> f64 {
        self.heat_ext_kw + self.tank_heat_kw - (self.heat_demand_kw + self.pipe_losses_kw)
    }

    pub fn tank_residual_j(&self) -> f64 {
        self.tank_stored_change_j - (self.tank_in_j - self.tank_out_j - self.tank_loss_j)
    }
}

pub const TRAJECTORY_HEADER: &str = "step,V1_pu,V2_pu,line0_loading_pct,hp_p_el_kw,hp_q_th_kw,cop,tank_top_c,tank_bottom_c,t_critical_c,heat_ext_kw,pv_kw,export_kw,mode";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub step_s: u64,
    pub records: Vec<StepRecord>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.records.len() * 160);
        out.push_str(TRAJECTORY_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.step,
                r.v1_pu,
                r.v2_pu,
                r.line0_loading_pct,
                r.hp_p_el_kw,
                r.hp_q_th_kw,
                r.cop,
                r.tank_top_c,
                r.tank_bottom_c,
                r.t_critical_c,
                r.heat_ext_kw,
                r.pv_kw,
                r.export_kw,
                r.mode
            );
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.to_csv())
    }
}
