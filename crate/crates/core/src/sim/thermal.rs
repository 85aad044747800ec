//! Quasi-static district-heating branch.
//!
//! External grid → pipe 0 → node A (tank injection, consumer 1) → pipe 1 →
//! node B (consumer 2, the critical node). Pipe 2 is the return path from
//! node A back to the external grid and only contributes losses. Consumers
//! cool their flow down to the network return temperature; the external
//! grid supplies at a fixed temperature and covers the residual.

use thiserror::Error;

use super::roots::illinois;
use crate::scenario::ThermalConfig;
use crate::WATER_CP;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThermalError {
    #[error("tank injection of {0} kg/s with no consumer demand")]
    InjectionWithoutDemand(f64),
    #[error("thermal network solve failed: {0}")]
    NoSolution(String),
}

/// Outlet temperature of a buried pipe with linear heat loss.
///
/// `T_out = T_g + (T_in − T_g)·exp(−U'·L / (ṁ·c_p))`; a stagnant pipe
/// (ṁ = 0) relaxes to ground temperature.
pub fn pipe_outlet_temperature(t_in_c: f64, mdot_kg_s: f64, length_m: f64, loss_w_per_m_k: f64, t_ground_c: f64) -> f64 {
    if mdot_kg_s <= 0.0 {
        return t_ground_c;
    }
    t_ground_c + (t_in_c - t_ground_c) * (-loss_w_per_m_k * length_m / (mdot_kg_s * WATER_CP)).exp()
}

/// Hot water pushed into node A by the tank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TankInjection {
    pub mdot_kg_s: f64,
    pub temperature_c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalState {
    /// Supply temperature at node A and node B.
    pub node_supply_c: [f64; 2],
    /// Mass flow in pipe 0, pipe 1 (supply) and pipe 2 (return).
    pub pipe_mass_flows: [f64; 3],
    /// Mass flow through consumer 1 and consumer 2.
    pub consumer_flows: [f64; 2],
    pub tank_mdot_kg_s: f64,
    /// Heat drawn from the external grid, kW.
    pub external_heat_kw: f64,
    /// Heat delivered by the tank into the network, kW.
    pub tank_heat_kw: f64,
    pub pipe_losses_kw: [f64; 3],
    /// Heat actually delivered to each consumer, kW.
    pub delivered_kw: [f64; 2],
    pub return_at_grid_c: f64,
}

impl ThermalState {
    /// Supply temperature at the farthest consumer with flow.
    pub fn critical_temperature_c(&self) -> f64 {
        self.node_supply_c[1]
    }

    pub fn pipe_loss_total_kw(&self) -> f64 {
        self.pipe_losses_kw.iter().sum()
    }
}

/// Solves the branch for consumer demands (kW) and an optional tank injection.
pub fn solve_thermal_network(
    cfg: &ThermalConfig,
    demand_kw: [f64; 2],
    tank: Option<TankInjection>,
) -> Result<ThermalState, ThermalError> {
    let t_s = cfg.supply_temperature_c;
    let t_r = cfg.return_temperature_c;
    let t_g = cfg.ground_temperature_c;
    let u = cfg.pipe_loss_w_per_m_k;
    let len = cfg.pipe_lengths_km.map(|l| l * 1e3);
    let q = demand_kw.map(|d| d.max(0.0) * 1e3);
    let (m_t, t_t) = tank.map_or((0.0, t_r), |t| (t.mdot_kg_s.max(0.0), t.temperature_c));

    if q[0] + q[1] <= 0.0 {
        if m_t > 0.0 {
            return Err(ThermalError::InjectionWithoutDemand(m_t));
        }
        return Ok(ThermalState {
            node_supply_c: [t_g, t_g],
            pipe_mass_flows: [0.0; 3],
            consumer_flows: [0.0; 2],
            tank_mdot_kg_s: 0.0,
            external_heat_kw: 0.0,
            tank_heat_kw: 0.0,
            pipe_losses_kw: [0.0; 3],
            delivered_kw: [0.0; 2],
            return_at_grid_c: t_g,
        });
    }

    // node B: pipe-1 flow such that consumer 2 gets q[1] at its outlet temperature
    let node_b = |t_a: f64| -> Option<f64> {
        if q[1] <= 0.0 {
            return Some(0.0);
        }
        if t_a <= t_r {
            return None;
        }
        let resid = |m: f64| m * WATER_CP * (pipe_outlet_temperature(t_a, m, len[1], u, t_g) - t_r) - q[1];
        let mut hi = 2.0 * q[1] / (WATER_CP * (t_a - t_r));
        let mut tries = 0;
        while resid(hi) <= 0.0 {
            hi *= 2.0;
            tries += 1;
            if tries > 60 {
                return None;
            }
        }
        illinois(resid, 0.0, hi, 1e-13 * q[1])
    };

    let mix = |m0: f64| -> f64 {
        let t0 = pipe_outlet_temperature(t_s, m0, len[0], u, t_g);
        if m0 + m_t > 0.0 {
            (m0 * t0 + m_t * t_t) / (m0 + m_t)
        } else {
            t0
        }
    };

    // mass balance at node A in the pipe-0 flow
    let balance = |m0: f64| -> f64 {
        let t_a = mix(m0);
        if t_a <= t_r + 1e-9 {
            return f64::NEG_INFINITY;
        }
        let m_c1 = q[0] / (WATER_CP * (t_a - t_r));
        match node_b(t_a) {
            Some(m1) => m0 + m_t - m_c1 - m1,
            None => f64::NEG_INFINITY,
        }
    };

    let total_q = q[0] + q[1];
    let mut hi = 2.0 * total_q / (WATER_CP * (t_s - t_r)) + 1e-3;
    let mut tries = 0;
    while !(balance(hi) > 0.0) {
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(ThermalError::NoSolution("no upper bracket for pipe-0 flow".into()));
        }
    }
    let m0 = if balance(0.0) >= 0.0 {
        0.0
    } else {
        illinois(balance, 0.0, hi, 1e-15 * hi)
            .ok_or_else(|| ThermalError::NoSolution("pipe-0 flow bracket failed".into()))?
    };

    let t0_out = pipe_outlet_temperature(t_s, m0, len[0], u, t_g);
    let t_a = mix(m0);
    let m1 = node_b(t_a).ok_or_else(|| ThermalError::NoSolution("node B".into()))?;
    let m_c1 = q[0] / (WATER_CP * (t_a - t_r));
    let t_b = if m1 > 0.0 { pipe_outlet_temperature(t_a, m1, len[1], u, t_g) } else { t_g };
    let t_ret_grid = pipe_outlet_temperature(t_r, m0, len[2], u, t_g);

    let kw = |w: f64| w * 1e-3;
    let loss0 = m0 * WATER_CP * (t_s - t0_out);
    let loss1 = m1 * WATER_CP * (t_a - t_b);
    let loss2 = m0 * WATER_CP * (t_r - t_ret_grid);
    Ok(ThermalState {
        node_supply_c: [t_a, t_b],
        pipe_mass_flows: [m0, m1, m0],
        consumer_flows: [m_c1, m1],
        tank_mdot_kg_s: m_t,
        external_heat_kw: kw(m0 * WATER_CP * (t_s - t_ret_grid)),
        tank_heat_kw: kw(m_t * WATER_CP * (t_t - t_r)),
        pipe_losses_kw: [kw(loss0), kw(loss1), kw(loss2)],
        delivered_kw: [kw(m_c1 * WATER_CP * (t_a - t_r)), kw(m1 * WATER_CP * (t_b - t_r))],
        return_at_grid_c: t_ret_grid,
    })
}
