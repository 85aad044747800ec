//! Backward/forward sweep on the three-bus radial feeder.

use nalgebra::Complex;
use thiserror::Error;

use crate::scenario::ElectricalConfig;

pub type C64 = Complex<f64>;

pub const MAX_ITERATIONS: usize = 100;
/// Convergence threshold on max |ΔV| between sweeps, p.u.
pub const TOLERANCE_PU: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PowerFlowError {
    #[error("sweep did not converge after {iterations} iterations (last max |dV| = {residual:e} pu)")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("voltage collapse: |V{bus}| = {magnitude} pu")]
    VoltageCollapse { bus: usize, magnitude: f64 },
}

/// Per-unit feeder: slack bus 0 → line 0 → bus 1 → line 1 → bus 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Feeder {
    pub line_impedance_pu: [C64; 2],
    pub slack_voltage_pu: f64,
    pub base_kva: f64,
    pub line_rating_kva: f64,
}

impl Feeder {
    pub fn from_config(e: &ElectricalConfig) -> Self {
        // Z_base = V_LL² / S_base
        let z_base = e.nominal_voltage_v.powi(2) / (e.base_power_kva * 1e3);
        let z = |len: f64| C64::new(e.resistance_ohm_per_km * len, e.reactance_ohm_per_km * len) / z_base;
        Self {
            line_impedance_pu: [z(e.line_lengths_km[0]), z(e.line_lengths_km[1])],
            slack_voltage_pu: e.slack_voltage_pu,
            base_kva: e.base_power_kva,
            line_rating_kva: e.line_rating_kva,
        }
    }
}

/// Converged operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectricalState {
    pub voltages_pu: [C64; 3],
    /// Sending-end apparent power per line, kVA.
    pub line_flows_kva: [f64; 2],
    /// Active power drawn from the upstream grid, kW (import positive).
    pub slack_import_kw: f64,
    pub losses_kw: f64,
    pub iterations: usize,
}

impl ElectricalState {
    pub fn voltage_magnitudes(&self) -> [f64; 3] {
        self.voltages_pu.map(|v| v.norm())
    }

    pub fn line_loading_pct(&self, feeder: &Feeder) -> [f64; 2] {
        self.line_flows_kva.map(|s| s / feeder.line_rating_kva * 100.0)
    }
}

/// Solves for bus voltages given net injections at bus 1 and bus 2
/// (kW + j·kvar, generation positive, constant power).
pub fn solve_radial_power_flow(feeder: &Feeder, injections_kva: [C64; 2]) -> Result<ElectricalState, PowerFlowError> {
    let s = injections_kva.map(|x| x / feeder.base_kva);
    let [z0, z1] = feeder.line_impedance_pu;
    let v0 = C64::new(feeder.slack_voltage_pu, 0.0);
    let mut v = [v0, v0, v0];

    let branch_currents = |v: &[C64; 3]| {
        let i_inj1 = (s[0] / v[1]).conj();
        let i_inj2 = (s[1] / v[2]).conj();
        // current flowing downstream in each line
        let i1 = -i_inj2;
        let i0 = -(i_inj1 + i_inj2);
        (i0, i1)
    };

    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (i0, i1) = branch_currents(&v);
        let v1 = v0 - z0 * i0;
        let v2 = v1 - z1 * i1;
        residual = (v1 - v[1]).norm().max((v2 - v[2]).norm());
        v = [v0, v1, v2];
        for (bus, vb) in v.iter().enumerate().skip(1) {
            let m = vb.norm();
            if !m.is_finite() || m < 0.2 {
                return Err(PowerFlowError::VoltageCollapse { bus, magnitude: m });
            }
        }
        if residual < TOLERANCE_PU {
            break;
        }
    }
    if residual >= TOLERANCE_PU {
        return Err(PowerFlowError::NonConvergence { iterations, residual });
    }

    let (i0, i1) = branch_currents(&v);
    let s0 = v[0] * i0.conj();
    let s1 = v[1] * i1.conj();
    let losses = i0.norm_sqr() * z0.re + i1.norm_sqr() * z1.re;
    Ok(ElectricalState {
        voltages_pu: v,
        line_flows_kva: [s0.norm() * feeder.base_kva, s1.norm() * feeder.base_kva],
        slack_import_kw: s0.re * feeder.base_kva,
        losses_kw: losses * feeder.base_kva,
        iterations,
    })
}
