//! One-dimensional stratified hot-water tank.
//!
//! Equal-mass layers, index 0 at the top. Charging enters hot at the top and
//! leaves from the bottom; discharging draws from the top and refills the
//! bottom at the network return temperature. Advection is upwind, inter-layer
//! conduction and ambient losses are explicit, and the step is split into
//! sub-steps small enough to keep every update a convex combination. After
//! each sub-step inverted layers are mixed until the profile is monotone.

use std::f64::consts::PI;

use thiserror::Error;

use crate::scenario::{tank_volume_m3, TankConfig};
use crate::{WATER_CP, WATER_DENSITY};

/// Smallest sub-step before the tank gives up, s.
pub const MIN_SUBSTEP_S: f64 = 1e-3;
const STABILITY_MARGIN: f64 = 0.9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TankError {
    #[error("sub-step {0:e} s below the 1 ms floor")]
    Unstable(f64),
    #[error("invalid tank input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TankGeometry {
    pub diameter_m: f64,
    pub height_m: f64,
    pub layers: usize,
}

impl TankGeometry {
    pub fn volume_m3(&self) -> f64 {
        tank_volume_m3(self.diameter_m, self.height_m)
    }

    pub fn cross_section_m2(&self) -> f64 {
        PI * (self.diameter_m / 2.0).powi(2)
    }

    pub fn layer_height_m(&self) -> f64 {
        self.height_m / self.layers as f64
    }

    pub fn layer_mass_kg(&self) -> f64 {
        WATER_DENSITY * self.volume_m3() / self.layers as f64
    }

    /// Ambient-exposed area of layer `j` (side wall, plus lid or floor at the ends).
    fn layer_area_m2(&self, j: usize) -> f64 {
        let mut a = PI * self.diameter_m * self.layer_height_m();
        if j == 0 {
            a += self.cross_section_m2();
        }
        if j + 1 == self.layers {
            a += self.cross_section_m2();
        }
        a
    }
}

/// Heat-transfer parameters that stay fixed during a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TankParams {
    pub loss_coefficient_w_per_m2_k: f64,
    pub conductivity_w_per_m_k: f64,
    /// Temperature of the water returning into the bottom on discharge.
    pub return_temperature_c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TankState {
    /// Layer temperatures, index 0 = top.
    pub temperatures_c: Vec<f64>,
    pub geometry: TankGeometry,
}

/// Energy bookkeeping for one call to [`TankState::step`], in joules
/// (enthalpies referenced to 0 °C).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TankEnergy {
    pub enthalpy_in_j: f64,
    pub enthalpy_out_j: f64,
    pub ambient_loss_j: f64,
    /// Heat added by the charge loop, `ṁ c_p (T_in − T_bottom)` integrated.
    pub charge_heat_j: f64,
    /// Heat removed by discharge, `ṁ c_p (T_top − T_return)` integrated.
    pub discharge_heat_j: f64,
    pub stored_before_j: f64,
    pub stored_after_j: f64,
    /// Flow-weighted mean temperature of the discharged water.
    pub discharge_outlet_c: f64,
    pub substeps: usize,
}

impl TankEnergy {
    /// `ΔE − (E_in − E_out − E_loss)`.
    pub fn residual_j(&self) -> f64 {
        (self.stored_after_j - self.stored_before_j)
            - (self.enthalpy_in_j - self.enthalpy_out_j - self.ambient_loss_j)
    }

    pub fn throughput_j(&self) -> f64 {
        self.charge_heat_j.abs() + self.discharge_heat_j.abs() + self.ambient_loss_j.abs()
    }
}

/// Pool-adjacent-violators: merges inverted neighbours into their mean
/// until temperatures are non-increasing top to bottom. Layers have equal
/// mass, so energy is conserved.
pub fn mix_inversions(t: &mut [f64]) {
    // stack of (sum, count) blocks
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(t.len());
    for &x in t.iter() {
        blocks.push((x, 1));
        while blocks.len() > 1 {
            let (s1, n1) = blocks[blocks.len() - 1];
            let (s0, n0) = blocks[blocks.len() - 2];
            if s1 / n1 as f64 > s0 / n0 as f64 {
                blocks.pop();
                let last = blocks.len() - 1;
                blocks[last] = (s0 + s1, n0 + n1);
            } else {
                break;
            }
        }
    }
    let mut i = 0;
    for (s, n) in blocks {
        let mean = s / n as f64;
        for x in &mut t[i..i + n] {
            *x = mean;
        }
        i += n;
    }
}

impl TankState {
    pub fn uniform(geometry: TankGeometry, temperature_c: f64) -> Self {
        Self {
            temperatures_c: vec![temperature_c; geometry.layers],
            geometry,
        }
    }

    pub fn from_config(cfg: &TankConfig) -> Self {
        Self::uniform(
            TankGeometry {
                diameter_m: cfg.inner_diameter_m,
                height_m: cfg.height_m,
                layers: cfg.layers,
            },
            cfg.initial_temperature_c,
        )
    }

    pub fn top_c(&self) -> f64 {
        self.temperatures_c[0]
    }

    pub fn bottom_c(&self) -> f64 {
        *self.temperatures_c.last().expect("tank has layers")
    }

    /// Stored sensible heat relative to 0 °C, J.
    pub fn stored_energy_j(&self) -> f64 {
        self.geometry.layer_mass_kg() * WATER_CP * self.temperatures_c.iter().sum::<f64>()
    }

    pub fn is_monotone(&self) -> bool {
        self.temperatures_c.windows(2).all(|w| w[0] >= w[1])
    }

    /// Advances the tank by `dt_s`.
    ///
    /// `charge` is `(ṁ, T_in)` entering the top; `discharge_mdot` is drawn
    /// from the top and replaced at the bottom by water at the return
    /// temperature.
    pub fn step(
        &self,
        params: &TankParams,
        charge: (f64, f64),
        discharge_mdot: f64,
        ambient_c: f64,
        dt_s: f64,
    ) -> Result<(TankState, TankEnergy), TankError> {
        let (m_c, t_in) = charge;
        if !(m_c >= 0.0 && discharge_mdot >= 0.0) {
            return Err(TankError::InvalidInput(format!(
                "flows must be non-negative (charge {m_c}, discharge {discharge_mdot})"
            )));
        }
        if !(dt_s > 0.0) {
            return Err(TankError::InvalidInput(format!("time step {dt_s} s")));
        }
        let m_d = discharge_mdot;
        let g = &self.geometry;
        let n = g.layers;
        let mass = g.layer_mass_kg();
        let heat_cap = mass * WATER_CP;
        let cond = params.conductivity_w_per_m_k * g.cross_section_m2() / g.layer_height_m();
        let ua: Vec<f64> = (0..n).map(|j| params.loss_coefficient_w_per_m2_k * g.layer_area_m2(j)).collect();
        let net_down = m_c - m_d;

        // explicit stability: each layer's outgoing coefficient below its heat capacity
        let worst = (0..n)
            .map(|j| {
                let mut out = 0.0;
                if j == 0 {
                    out += m_d;
                }
                if j + 1 == n {
                    out += m_c;
                }
                if j + 1 < n && net_down > 0.0 {
                    out += net_down;
                }
                if j > 0 && net_down < 0.0 {
                    out += -net_down;
                }
                let neighbours = (j > 0) as usize + (j + 1 < n) as usize;
                (out * WATER_CP + neighbours as f64 * cond + ua[j]) / heat_cap
            })
            .fold(0.0, f64::max);
        let substeps = if worst > 0.0 {
            let dt_max = STABILITY_MARGIN / worst;
            (dt_s / dt_max).ceil().max(1.0) as usize
        } else {
            1
        };
        let h = dt_s / substeps as f64;
        if h < MIN_SUBSTEP_S {
            return Err(TankError::Unstable(h));
        }

        let mut t = self.temperatures_c.clone();
        let mut e = TankEnergy {
            stored_before_j: self.stored_energy_j(),
            substeps,
            ..Default::default()
        };
        let mut discharge_enthalpy = 0.0;
        let mut dq = vec![0.0; n];
        for _ in 0..substeps {
            dq.iter_mut().for_each(|x| *x = 0.0);
            let (top, bottom) = (t[0], t[n - 1]);
            // boundary flows (W)
            dq[0] += m_c * WATER_CP * t_in - m_d * WATER_CP * top;
            dq[n - 1] += m_d * WATER_CP * params.return_temperature_c - m_c * WATER_CP * bottom;
            for j in 0..n.saturating_sub(1) {
                let adv = if net_down >= 0.0 { net_down * t[j] } else { net_down * t[j + 1] };
                let q = adv * WATER_CP + cond * (t[j] - t[j + 1]);
                dq[j] -= q;
                dq[j + 1] += q;
            }
            let mut loss = 0.0;
            for j in 0..n {
                let l = ua[j] * (t[j] - ambient_c);
                dq[j] -= l;
                loss += l;
            }
            for j in 0..n {
                t[j] += h * dq[j] / heat_cap;
            }
            mix_inversions(&mut t);

            e.enthalpy_in_j += h * WATER_CP * (m_c * t_in + m_d * params.return_temperature_c);
            e.enthalpy_out_j += h * WATER_CP * (m_d * top + m_c * bottom);
            e.ambient_loss_j += h * loss;
            e.charge_heat_j += h * m_c * WATER_CP * (t_in - bottom);
            e.discharge_heat_j += h * m_d * WATER_CP * (top - params.return_temperature_c);
            discharge_enthalpy += h * m_d * top;
        }

        let next = TankState { temperatures_c: t, geometry: *g };
        e.stored_after_j = next.stored_energy_j();
        e.discharge_outlet_c = if m_d > 0.0 { discharge_enthalpy / (m_d * dt_s) } else { self.top_c() };
        Ok((next, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn geometry(d: f64) -> TankGeometry {
        TankGeometry { diameter_m: d, height_m: 7.9, layers: 10 }
    }

    fn params(u: f64, k: f64) -> TankParams {
        TankParams { loss_coefficient_w_per_m2_k: u, conductivity_w_per_m_k: k, return_temperature_c: 45.0 }
    }

    #[test]
    fn isolated_uniform_tank_unchanged() {
        let s = TankState::uniform(geometry(2.0), 60.0);
        let (n, e) = s.step(&params(0.0, 0.6), (0.0, 0.0), 0.0, 10.0, 900.0).unwrap();
        assert_eq!(n, s);
        assert_eq!(e.residual_j(), 0.0);
    }

    #[test]
    fn isolated_stratified_tank_unchanged_without_conduction() {
        let mut s = TankState::uniform(geometry(2.0), 60.0);
        s.temperatures_c = (0..10).map(|j| 75.0 - 3.0 * j as f64).collect();
        let (n, _) = s.step(&params(0.0, 0.0), (0.0, 0.0), 0.0, 10.0, 900.0).unwrap();
        assert_eq!(n, s);
    }

    #[test]
    fn small_tank_capacity() {
        let g = geometry(1.0);
        assert!((g.volume_m3() - 6.2046).abs() < 1e-3);
        let kwh = g.volume_m3() * WATER_DENSITY * WATER_CP * 10.0 / 3.6e6;
        assert!((kwh - 72.1).abs() < 0.1);
        assert!((kwh / 100.0 - 0.72).abs() < 0.01);
    }

    #[test]
    fn charging_heats_from_the_top() {
        let s = TankState::uniform(geometry(1.0), 45.0);
        let (n, e) = s.step(&params(0.3, 0.6), (2.0, 75.0), 0.0, 10.0, 900.0).unwrap();
        assert!(n.top_c() > 70.0);
        assert!(n.bottom_c() < 46.0);
        assert!(n.is_monotone());
        assert!(e.residual_j().abs() < 1e-9 * e.throughput_j());
    }

    #[test]
    fn mixing_restores_monotone_profile() {
        let mut t = vec![50.0, 60.0, 55.0, 40.0, 45.0];
        let before: f64 = t.iter().sum();
        mix_inversions(&mut t);
        assert!(t.windows(2).all(|w| w[0] >= w[1]));
        assert!((t.iter().sum::<f64>() - before).abs() < 1e-12);
        assert_eq!(t, vec![55.0, 55.0, 55.0, 42.5, 42.5]);
    }

    #[test]
    fn negative_flow_rejected() {
        let s = TankState::uniform(geometry(1.0), 45.0);
        assert!(s.step(&params(0.3, 0.6), (-1.0, 75.0), 0.0, 10.0, 900.0).is_err());
    }

    proptest! {
        #[test]
        fn step_conserves_energy_and_stays_bounded(
            d in 1.0f64..8.0,
            m_c in 0.0f64..8.0,
            m_d in 0.0f64..8.0,
            t0 in proptest::collection::vec(45.0f64..75.0, 10),
        ) {
            let mut s = TankState::uniform(geometry(d), 50.0);
            s.temperatures_c = t0;
            mix_inversions(&mut s.temperatures_c);
            let (n, e) = s.step(&params(0.3, 0.6), (m_c, 75.0), m_d, 10.0, 900.0).unwrap();
            prop_assert!(n.is_monotone());
            prop_assert!(n.temperatures_c.iter().all(|t| *t >= 10.0 && *t <= 100.0));
            prop_assert!(e.residual_j().abs() <= 1e-3 * e.throughput_j() + 1e-12 * e.stored_before_j);
        }
    }
}
