use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Recipe, ScenarioError};

/// Radial LV feeder: slack bus 0 → line 0 → bus 1 → line 1 → bus 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElectricalConfig {
    pub line_lengths_km: [f64; 2],
    pub resistance_ohm_per_km: f64,
    pub reactance_ohm_per_km: f64,
    pub line_rating_kva: f64,
    pub slack_voltage_pu: f64,
    pub nominal_voltage_v: f64,
    pub base_power_kva: f64,
    /// Power factor (lagging) of the consumer loads; PV and heat pump run at unity.
    pub load_power_factor: f64,
    /// Unscaled PV peaks at bus 1 and bus 2.
    pub pv_peaks_kw: [f64; 2],
}

impl Default for ElectricalConfig {
    fn default() -> Self {
        Self {
            line_lengths_km: [0.3, 0.3],
            resistance_ohm_per_km: 0.208,
            reactance_ohm_per_km: 0.080,
            line_rating_kva: 250.0,
            slack_voltage_pu: 1.0,
            nominal_voltage_v: 400.0,
            base_power_kva: 100.0,
            load_power_factor: 0.95,
            pv_peaks_kw: [150.0, 50.0],
        }
    }
}

/// District-heating branch: external grid → pipe 0 → node A → pipe 1 → node B,
/// with pipe 2 as the return path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalConfig {
    pub pipe_lengths_km: [f64; 3],
    pub pipe_loss_w_per_m_k: f64,
    pub ground_temperature_c: f64,
    pub supply_temperature_c: f64,
    pub return_temperature_c: f64,
}

impl Default for ThermalConfig {
    fn default() -> Self {
        Self {
            pipe_lengths_km: [0.5, 0.5, 0.5],
            pipe_loss_w_per_m_k: 0.4,
            ground_temperature_c: 10.0,
            supply_temperature_c: 75.0,
            return_temperature_c: 45.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatPumpConfig {
    pub rated_power_kw: f64,
    pub min_operating_kw: f64,
    pub carnot_efficiency: f64,
    pub pinch_condenser_k: f64,
    pub pinch_evaporator_k: f64,
    pub source_temperature_c: f64,
}

impl Default for HeatPumpConfig {
    fn default() -> Self {
        Self {
            rated_power_kw: 100.0,
            min_operating_kw: 25.0,
            carnot_efficiency: 0.45,
            pinch_condenser_k: 5.0,
            pinch_evaporator_k: 5.0,
            source_temperature_c: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TankConfig {
    pub inner_diameter_m: f64,
    pub height_m: f64,
    pub layers: usize,
    pub loss_coefficient_w_per_m2_k: f64,
    /// Effective vertical conductivity between layers, W/(m·K).
    pub conductivity_w_per_m_k: f64,
    /// Heat-pump delivery temperature into the tank top.
    pub charge_setpoint_c: f64,
    /// Fraction of consumer demand the tank may cover while discharging.
    pub discharge_share: f64,
    pub initial_temperature_c: f64,
}

impl Default for TankConfig {
    fn default() -> Self {
        Self {
            inner_diameter_m: 4.0,
            height_m: 7.9,
            layers: 10,
            loss_coefficient_w_per_m2_k: 0.3,
            conductivity_w_per_m_k: 0.6,
            charge_setpoint_c: 75.0,
            discharge_share: 0.8,
            initial_temperature_c: 50.0,
        }
    }
}

impl TankConfig {
    pub fn volume_m3(&self) -> f64 {
        tank_volume_m3(self.inner_diameter_m, self.height_m)
    }
}

/// Cylinder volume π·(d/2)²·h.
pub fn tank_volume_m3(diameter_m: f64, height_m: f64) -> f64 {
    PI * (diameter_m / 2.0).powi(2) * height_m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlConfig {
    pub voltage_control_enabled: bool,
    pub flex_heat_enabled: bool,
    pub kp: f64,
    pub v_ref_pu: f64,
    pub charge_start_c: f64,
    pub charge_stop_c: f64,
    pub discharge_start_c: f64,
    pub discharge_stop_c: f64,
    pub surplus_threshold_kw: f64,
}

impl Default for ControlConfig {
    fn default() -> Self {
        Self {
            voltage_control_enabled: true,
            flex_heat_enabled: true,
            kp: 20.0,
            v_ref_pu: 0.96,
            charge_start_c: 55.0,
            charge_stop_c: 70.0,
            discharge_start_c: 70.0,
            discharge_stop_c: 60.0,
            surplus_threshold_kw: 0.0,
        }
    }
}

/// Where the per-step time series come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProfileSource {
    /// Seeded synthetic week; see [`super::profiles::synthetic`].
    Synthetic(SyntheticParams),
    /// `profiles.csv`, relative paths resolved against the config file.
    Csv { path: PathBuf },
    /// Every series identically zero.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticParams {
    /// Peak electrical demand per consumer, kW.
    pub load_peak_kw: [f64; 2],
    /// Building heat-loss coefficient per consumer, kW/K.
    pub heat_ua_kw_per_k: [f64; 2],
    /// Domestic hot-water base load per consumer, kW.
    pub dhw_base_kw: [f64; 2],
    pub heating_limit_c: f64,
    pub outdoor_mean_c: f64,
    pub outdoor_amplitude_k: f64,
    /// Relative amplitude of the uniform per-step noise.
    pub noise: f64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            load_peak_kw: [45.0, 30.0],
            heat_ua_kw_per_k: [8.0, 6.0],
            dhw_base_kw: [20.0, 15.0],
            heating_limit_c: 15.0,
            outdoor_mean_c: 8.0,
            outdoor_amplitude_k: 5.0,
            noise: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub source: ProfileSource,
    pub pv_scaling: f64,
    pub load_scaling: f64,
    pub heat_scaling: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self {
            source: ProfileSource::Synthetic(SyntheticParams::default()),
            pv_scaling: 1.0,
            load_scaling: 1.0,
            heat_scaling: 1.0,
        }
    }
}

/// Every physical and control parameter of the benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub electrical: ElectricalConfig,
    pub thermal: ThermalConfig,
    pub heat_pump: HeatPumpConfig,
    pub tank: TankConfig,
    pub control: ControlConfig,
    pub profiles: ProfileConfig,
    pub horizon_s: u64,
    pub step_s: u64,
    pub seed: u64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            electrical: ElectricalConfig::default(),
            thermal: ThermalConfig::default(),
            heat_pump: HeatPumpConfig::default(),
            tank: TankConfig::default(),
            control: ControlConfig::default(),
            profiles: ProfileConfig::default(),
            horizon_s: 7 * 24 * 3600,
            step_s: 900,
            seed: 42,
        }
    }
}

fn invalid(field: &str, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::InvalidConfig {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn positive(field: &str, v: f64) -> Result<(), ScenarioError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be > 0, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<(), ScenarioError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be >= 0, got {v}")))
    }
}

impl BenchmarkConfig {
    pub fn steps(&self) -> usize {
        (self.horizon_s / self.step_s) as usize
    }

    pub fn step_hours(&self) -> f64 {
        self.step_s as f64 / 3600.0
    }

    /// Effective PV peaks after scaling.
    pub fn pv_peaks_kw(&self) -> [f64; 2] {
        let s = self.profiles.pv_scaling;
        [self.electrical.pv_peaks_kw[0] * s, self.electrical.pv_peaks_kw[1] * s]
    }

    pub fn tank_volume_m3(&self) -> f64 {
        self.tank.volume_m3()
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let e = &self.electrical;
        for (i, l) in e.line_lengths_km.iter().enumerate() {
            positive(&format!("electrical.line_lengths_km[{i}]"), *l)?;
        }
        non_negative("electrical.resistance_ohm_per_km", e.resistance_ohm_per_km)?;
        non_negative("electrical.reactance_ohm_per_km", e.reactance_ohm_per_km)?;
        positive("electrical.line_rating_kva", e.line_rating_kva)?;
        positive("electrical.slack_voltage_pu", e.slack_voltage_pu)?;
        positive("electrical.nominal_voltage_v", e.nominal_voltage_v)?;
        positive("electrical.base_power_kva", e.base_power_kva)?;
        if !(e.load_power_factor > 0.0 && e.load_power_factor <= 1.0) {
            return Err(invalid("electrical.load_power_factor", "must be in (0, 1]"));
        }
        for (i, p) in e.pv_peaks_kw.iter().enumerate() {
            non_negative(&format!("electrical.pv_peaks_kw[{i}]"), *p)?;
        }

        let t = &self.thermal;
        for (i, l) in t.pipe_lengths_km.iter().enumerate() {
            positive(&format!("thermal.pipe_lengths_km[{i}]"), *l)?;
        }
        non_negative("thermal.pipe_loss_w_per_m_k", t.pipe_loss_w_per_m_k)?;
        if !(t.supply_temperature_c > t.return_temperature_c
            && t.return_temperature_c > t.ground_temperature_c)
        {
            return Err(invalid(
                "thermal",
                "require supply > return > ground temperature",
            ));
        }

        let hp = &self.heat_pump;
        positive("heat_pump.rated_power_kw", hp.rated_power_kw)?;
        non_negative("heat_pump.min_operating_kw", hp.min_operating_kw)?;
        if hp.min_operating_kw > hp.rated_power_kw {
            return Err(invalid(
                "heat_pump.min_operating_kw",
                format!(
                    "minimum operating point {} kW exceeds rated power {} kW",
                    hp.min_operating_kw, hp.rated_power_kw
                ),
            ));
        }
        if !(hp.carnot_efficiency > 0.0 && hp.carnot_efficiency <= 1.0) {
            return Err(invalid("heat_pump.carnot_efficiency", "must be in (0, 1]"));
        }
        non_negative("heat_pump.pinch_condenser_k", hp.pinch_condenser_k)?;
        non_negative("heat_pump.pinch_evaporator_k", hp.pinch_evaporator_k)?;

        let tk = &self.tank;
        positive("tank.inner_diameter_m", tk.inner_diameter_m)?;
        positive("tank.height_m", tk.height_m)?;
        if tk.layers == 0 {
            return Err(invalid("tank.layers", "must be >= 1"));
        }
        non_negative("tank.loss_coefficient_w_per_m2_k", tk.loss_coefficient_w_per_m2_k)?;
        non_negative("tank.conductivity_w_per_m_k", tk.conductivity_w_per_m_k)?;
        if !(tk.discharge_share > 0.0 && tk.discharge_share < 1.0) {
            return Err(invalid("tank.discharge_share", "must be in (0, 1)"));
        }
        if tk.charge_setpoint_c > 100.0 || tk.charge_setpoint_c <= t.return_temperature_c {
            return Err(invalid(
                "tank.charge_setpoint_c",
                "must lie above the network return temperature and at most 100 °C",
            ));
        }
        if !(tk.initial_temperature_c >= t.ground_temperature_c && tk.initial_temperature_c <= 100.0) {
            return Err(invalid("tank.initial_temperature_c", "must lie in [ground, 100] °C"));
        }

        let c = &self.control;
        non_negative("control.kp", c.kp)?;
        if !(0.9..=1.1).contains(&c.v_ref_pu) {
            return Err(invalid("control.v_ref_pu", "must lie in [0.9, 1.1]"));
        }
        if c.charge_start_c >= c.charge_stop_c {
            return Err(invalid("control.charge_start_c", "must be below charge_stop_c"));
        }
        if c.discharge_stop_c >= c.discharge_start_c {
            return Err(invalid("control.discharge_stop_c", "must be below discharge_start_c"));
        }
        non_negative("control.surplus_threshold_kw", c.surplus_threshold_kw)?;

        let p = &self.profiles;
        non_negative("profiles.pv_scaling", p.pv_scaling)?;
        non_negative("profiles.load_scaling", p.load_scaling)?;
        non_negative("profiles.heat_scaling", p.heat_scaling)?;

        if self.step_s == 0 || self.horizon_s == 0 {
            return Err(invalid("step_s", "horizon and step must be positive"));
        }
        if !self.horizon_s.is_multiple_of(self.step_s) {
            return Err(invalid(
                "step_s",
                format!("step {} s does not divide horizon {} s", self.step_s, self.horizon_s),
            ));
        }
        Ok(())
    }

    /// Rewrites a relative CSV profile path against `dir`.
    pub fn resolve_paths(&mut self, dir: &Path) {
        if let ProfileSource::Csv { path } = &mut self.profiles.source {
            if path.is_relative() {
                *path = dir.join(&*path);
            }
        }
    }

    /// SHA-256 over the canonical JSON serialisation, hex encoded.
    pub fn hash_hex(&self) -> String {
        let json = serde_json::to_string(self).expect("config serialises");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let mut cfg: Self = serde_json::from_str(&super::read_file(path)?)?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
        super::write_json(path.as_ref(), self)
    }
}

type Setter = fn(&mut BenchmarkConfig, f64);

/// Name → config binding table. Every binding sets (never accumulates) its
/// target, so applying a recipe twice is the same as applying it once.
pub const FACTOR_BINDINGS: &[(&str, &str, Setter)] = &[
    ("pv_scaling", "multiplier on both PV peaks", |c, v| c.profiles.pv_scaling = v),
    ("heat_profile_scaling", "multiplier on the heat-load series", |c, v| {
        c.profiles.heat_scaling = v
    }),
    ("load_scaling", "multiplier on the electrical-load series", |c, v| {
        c.profiles.load_scaling = v
    }),
    ("hp_power", "heat-pump rated electrical power, kW", |c, v| {
        c.heat_pump.rated_power_kw = v
    }),
    ("hp_min_op", "heat-pump minimum operating point, kW", |c, v| {
        c.heat_pump.min_operating_kw = v
    }),
    ("hwt_inner_diameter", "tank inner diameter, m", |c, v| c.tank.inner_diameter_m = v),
    ("kp", "voltage-controller proportional gain, 1/pu", |c, v| c.control.kp = v),
    ("charge_start_c", "flex-heat charge request threshold on tank bottom, °C", |c, v| {
        c.control.charge_start_c = v
    }),
    ("charge_stop_c", "flex-heat charge stop threshold on tank bottom, °C", |c, v| {
        c.control.charge_stop_c = v
    }),
    ("discharge_start_c", "flex-heat discharge start threshold on tank top, °C", |c, v| {
        c.control.discharge_start_c = v
    }),
    ("discharge_stop_c", "flex-heat discharge stop threshold on tank top, °C", |c, v| {
        c.control.discharge_stop_c = v
    }),
];

pub fn is_bound_factor(name: &str) -> bool {
    FACTOR_BINDINGS.iter().any(|(n, _, _)| *n == name)
}

/// Returns a copy of `config` with every recipe assignment substituted.
pub fn apply_recipe(config: &BenchmarkConfig, recipe: &Recipe) -> Result<BenchmarkConfig, ScenarioError> {
    let mut out = config.clone();
    for (name, &value) in &recipe.assignments {
        let (_, _, set) = FACTOR_BINDINGS
            .iter()
            .find(|(n, _, _)| n == name)
            .ok_or_else(|| ScenarioError::UnknownFactor(name.clone()))?;
        set(&mut out, value);
    }
    Ok(out)
}
