//! The six per-run target metrics.
//!
//! Energies are reported in MWh. Self-consumption is measured against
//! export at the slack bus; the average COP is energy weighted over the
//! steps where the heat pump runs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::Trajectory;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("empty trajectory")]
    Empty,
    #[error("unknown metric {0:?}")]
    UnknownMetric(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub max_voltage_bus2: f64,
    pub max_line_loading_line0: f64,
    pub hp_average_cop: f64,
    pub self_consumption_mwh: f64,
    pub self_consumption_pct: f64,
    pub min_supply_temperature: f64,
    pub imported_heat_mwh: f64,
}

/// Column names used in result files, in output order.
pub const METRIC_NAMES: [&str; 7] = [
    "max_v2_pu",
    "max_line0_pct",
    "avg_cop",
    "self_cons_mwh",
    "self_cons_pct",
    "min_tsupply_c",
    "heat_import_mwh",
];

/// The six metrics of the benchmark's target table (percent self-consumption
/// is a derived extra). Used as the default set for rankings.
pub const TABLE_METRICS: [&str; 6] = [
    "max_v2_pu",
    "max_line0_pct",
    "avg_cop",
    "self_cons_mwh",
    "min_tsupply_c",
    "heat_import_mwh",
];

impl MetricSet {
    pub fn values(&self) -> [f64; 7] {
        [
            self.max_voltage_bus2,
            self.max_line_loading_line0,
            self.hp_average_cop,
            self.self_consumption_mwh,
            self.self_consumption_pct,
            self.min_supply_temperature,
            self.imported_heat_mwh,
        ]
    }

    pub fn from_values(v: [f64; 7]) -> Self {
        Self {
            max_voltage_bus2: v[0],
            max_line_loading_line0: v[1],
            hp_average_cop: v[2],
            self_consumption_mwh: v[3],
            self_consumption_pct: v[4],
            min_supply_temperature: v[5],
            imported_heat_mwh: v[6],
        }
    }

    pub fn get(&self, name: &str) -> Result<f64, MetricsError> {
        metric_index(name).map(|i| self.values()[i])
    }
}

pub fn metric_index(name: &str) -> Result<usize, MetricsError> {
    METRIC_NAMES
        .iter()
        .position(|n| *n == name)
        .ok_or_else(|| MetricsError::UnknownMetric(name.to_string()))
}

/// Reduces a trajectory to its target metrics; `step_s` is Δt in seconds.
pub fn compute_metrics(trajectory: &Trajectory, step_s: f64) -> Result<MetricSet, MetricsError> {
    let recs = &trajectory.records;
    if recs.is_empty() {
        return Err(MetricsError::Empty);
    }
    let dt_h = step_s / 3600.0;
    let max_v2 = recs.iter().map(|r| r.v2_pu).fold(f64::NEG_INFINITY, f64::max);
    let max_line = recs.iter().map(|r| r.line0_loading_pct).fold(f64::NEG_INFINITY, f64::max);

    let (q_on, p_on) = recs
        .iter()
        .filter(|r| r.hp_p_el_kw > 0.0)
        .fold((0.0, 0.0), |(q, p), r| (q + r.hp_q_th_kw, p + r.hp_p_el_kw));
    let cop = if p_on > 0.0 { q_on / p_on } else { 0.0 };

    let pv_kwh: f64 = recs.iter().map(|r| r.pv_kw).sum::<f64>() * dt_h;
    let self_kwh: f64 = recs.iter().map(|r| (r.pv_kw - r.export_kw).max(0.0)).sum::<f64>() * dt_h;
    let self_pct = if pv_kwh > 0.0 { (self_kwh / pv_kwh * 100.0).clamp(0.0, 100.0) } else { 100.0 };

    let min_t = recs.iter().map(|r| r.t_critical_c).fold(f64::INFINITY, f64::min);
    let heat_kwh: f64 = recs.iter().map(|r| r.heat_ext_kw.max(0.0)).sum::<f64>() * dt_h;

    Ok(MetricSet {
        max_voltage_bus2: max_v2,
        max_line_loading_line0: max_line,
        hp_average_cop: cop,
        self_consumption_mwh: self_kwh / 1e3,
        self_consumption_pct: self_pct,
        min_supply_temperature: min_t,
        imported_heat_mwh: heat_kwh / 1e3,
    })
}
