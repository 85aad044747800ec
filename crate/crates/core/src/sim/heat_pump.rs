use thiserror::Error;

use crate::scenario::HeatPumpConfig;

pub const COP_MIN: f64 = 1.0;
pub const COP_MAX: f64 = 8.0;
const KELVIN: f64 = 273.15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeatPumpError {
    #[error("infeasible lift: condensing {t_cond_c} °C not above evaporating {t_evap_c} °C")]
    NoLift { t_evap_c: f64, t_cond_c: f64 },
    #[error("electrical power {p_el_kw} kW outside {{0}} ∪ [{min_kw}, {rated_kw}] kW")]
    OutOfRange { p_el_kw: f64, min_kw: f64, rated_kw: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatPumpOutput {
    pub q_th_kw: f64,
    /// 0 when the unit is off.
    pub cop: f64,
}

/// Carnot-fraction COP from (already pinch-adjusted) evaporating and
/// condensing temperatures, clamped to `[1, 8]`.
pub fn carnot_cop(efficiency: f64, t_evap_c: f64, t_cond_c: f64) -> Result<f64, HeatPumpError> {
    if t_cond_c <= t_evap_c {
        return Err(HeatPumpError::NoLift { t_evap_c, t_cond_c });
    }
    let t_cond_k = t_cond_c + KELVIN;
    let t_evap_k = t_evap_c + KELVIN;
    Ok((efficiency * t_cond_k / (t_cond_k - t_evap_k)).clamp(COP_MIN, COP_MAX))
}

/// Thermal output for an electrical input, a source temperature on the
/// evaporator side and a sink temperature on the condenser side.
pub fn heat_pump_step(
    p_el_kw: f64,
    t_source_c: f64,
    t_sink_c: f64,
    params: &HeatPumpConfig,
) -> Result<HeatPumpOutput, HeatPumpError> {
    if p_el_kw == 0.0 {
        return Ok(HeatPumpOutput { q_th_kw: 0.0, cop: 0.0 });
    }
    // small slack for setpoints computed as min(…) of floats
    let eps = 1e-9 * params.rated_power_kw.max(1.0);
    if !(p_el_kw >= params.min_operating_kw - eps && p_el_kw <= params.rated_power_kw + eps) {
        return Err(HeatPumpError::OutOfRange {
            p_el_kw,
            min_kw: params.min_operating_kw,
            rated_kw: params.rated_power_kw,
        });
    }
    let t_evap = t_source_c - params.pinch_evaporator_k;
    let t_cond = t_sink_c + params.pinch_condenser_k;
    let cop = carnot_cop(params.carnot_efficiency, t_evap, t_cond)?;
    Ok(HeatPumpOutput { q_th_kw: cop * p_el_kw, cop })
}
