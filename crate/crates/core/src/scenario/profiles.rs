use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{BenchmarkConfig, ProfileSource, SyntheticParams};
use super::ScenarioError;

/// Per-step input series for the two consumers.
///
/// Loads are unscaled kW; `pv_normalized` is the fraction of peak output.
#[derive(Debug, Clone, PartialEq)]
pub struct Profiles {
    pub timestamps: Vec<f64>,
    pub pv_normalized: Vec<f64>,
    pub electrical_load: [Vec<f64>; 2],
    pub heat_load: [Vec<f64>; 2],
}

pub const CSV_HEADER: [&str; 6] = ["timestamp", "pv", "load_el_1", "load_el_2", "load_th_1", "load_th_2"];

impl Profiles {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn zeros(steps: usize, step_s: u64) -> Self {
        Self {
            timestamps: (0..steps).map(|k| (k as u64 * step_s) as f64).collect(),
            pv_normalized: vec![0.0; steps],
            electrical_load: [vec![0.0; steps], vec![0.0; steps]],
            heat_load: [vec![0.0; steps], vec![0.0; steps]],
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let n = self.len();
        let lens = [
            self.pv_normalized.len(),
            self.electrical_load[0].len(),
            self.electrical_load[1].len(),
            self.heat_load[0].len(),
            self.heat_load[1].len(),
        ];
        if lens.iter().any(|&l| l != n) {
            return Err(ScenarioError::InvalidProfiles("series lengths differ".into()));
        }
        if let Some(k) = self.pv_normalized.iter().position(|p| !(0.0..=1.0).contains(p)) {
            return Err(ScenarioError::InvalidProfiles(format!("pv at row {k} outside [0, 1]")));
        }
        for series in self.electrical_load.iter().chain(self.heat_load.iter()) {
            if let Some(k) = series.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(ScenarioError::InvalidProfiles(format!("negative load at row {k}")));
            }
        }
        Ok(())
    }

    /// Keeps the first `steps` rows.
    pub fn truncated(mut self, steps: usize) -> Result<Self, ScenarioError> {
        if self.len() < steps {
            return Err(ScenarioError::InvalidProfiles(format!(
                "profiles have {} rows, horizon needs {steps}",
                self.len()
            )));
        }
        self.timestamps.truncate(steps);
        self.pv_normalized.truncate(steps);
        for s in self.electrical_load.iter_mut().chain(self.heat_load.iter_mut()) {
            s.truncate(steps);
        }
        Ok(self)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| ScenarioError::Csv(format!("{}: {e}", path.display())))?;
        let header = reader.headers().map_err(|e| ScenarioError::Csv(e.to_string()))?.clone();
        if header.iter().collect::<Vec<_>>() != CSV_HEADER {
            return Err(ScenarioError::Csv(format!(
                "{}: expected header {}, got {}",
                path.display(),
                CSV_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut p = Profiles::zeros(0, 1);
        for (row, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| ScenarioError::Csv(e.to_string()))?;
            let mut vals = [0.0; 6];
            for (i, v) in vals.iter_mut().enumerate() {
                *v = rec[i].parse().map_err(|_| {
                    ScenarioError::Csv(format!("row {}: cannot parse {:?}", row + 2, &rec[i]))
                })?;
            }
            p.timestamps.push(vals[0]);
            p.pv_normalized.push(vals[1]);
            p.electrical_load[0].push(vals[2]);
            p.electrical_load[1].push(vals[3]);
            p.heat_load[0].push(vals[4]);
            p.heat_load[1].push(vals[5]);
        }
        p.validate()?;
        Ok(p)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
        let mut w = csv::Writer::from_path(path.as_ref()).map_err(|e| ScenarioError::Csv(e.to_string()))?;
        w.write_record(CSV_HEADER).map_err(|e| ScenarioError::Csv(e.to_string()))?;
        for k in 0..self.len() {
            let row = [
                self.timestamps[k],
                self.pv_normalized[k],
                self.electrical_load[0][k],
                self.electrical_load[1][k],
                self.heat_load[0][k],
                self.heat_load[1][k],
            ];
            w.write_record(row.iter().map(|v| v.to_string()))
                .map_err(|e| ScenarioError::Csv(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Resolves the config's profile source into series covering the horizon.
pub fn load_profiles(config: &BenchmarkConfig) -> Result<Profiles, ScenarioError> {
    let steps = config.steps();
    let p = match &config.profiles.source {
        ProfileSource::Synthetic(params) => synthetic(params, steps, config.step_s, config.seed),
        ProfileSource::Csv { path } => Profiles::read_csv(path)?.truncated(steps)?,
        ProfileSource::Zero => Profiles::zeros(steps, config.step_s),
    };
    p.validate()?;
    Ok(p)
}

fn bump(hour: f64, centre: f64, width: f64) -> f64 {
    // wrap around midnight so a 23h peak still reaches 1h
    let d = (hour - centre + 12.0).rem_euclid(24.0) - 12.0;
    (-0.5 * (d / width).powi(2)).exp()
}

/// Deterministic synthetic week.
///
/// PV is a clipped diurnal sinusoid with a per-day clearness index;
/// electrical loads have morning and evening peaks; heat loads follow a
/// degree-hour model on a diurnal outdoor temperature plus a hot-water base
/// with the same peaks. All series carry seeded uniform noise.
pub fn synthetic(params: &SyntheticParams, steps: usize, step_s: u64, seed: u64) -> Profiles {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let days = (steps as u64 * step_s).div_ceil(86_400) as usize + 1;
    let clearness: Vec<f64> = (0..days).map(|_| rng.gen_range(0.35..1.0)).collect();
    let temp_offset: Vec<f64> = (0..days).map(|_| rng.gen_range(-3.0..3.0)).collect();

    let mut p = Profiles::zeros(steps, step_s);
    let noise = params.noise;
    for k in 0..steps {
        let t = p.timestamps[k];
        let day = (t / 86_400.0) as usize;
        let hour = (t % 86_400.0) / 3600.0;

        let sun = (PI * (hour - 6.0) / 12.0).sin().max(0.0);
        let pv = sun * clearness[day] * (1.0 + noise * rng.gen_range(-1.0..1.0));
        p.pv_normalized[k] = pv.clamp(0.0, 1.0);

        let shape = 0.3 + 0.5 * bump(hour, 7.5, 1.5) + 0.7 * bump(hour, 19.0, 2.0);
        for c in 0..2 {
            let n = 1.0 + noise * rng.gen_range(-1.0..1.0);
            p.electrical_load[c][k] = (params.load_peak_kw[c] * shape * n).max(0.0);
        }

        let outdoor = params.outdoor_mean_c
            + temp_offset[day]
            + params.outdoor_amplitude_k * (2.0 * PI * (hour - 9.0) / 24.0).sin();
        let dhw_shape = 0.6 + 0.6 * bump(hour, 7.0, 1.0) + 0.5 * bump(hour, 20.0, 1.5);
        for c in 0..2 {
            let space = params.heat_ua_kw_per_k[c] * (params.heating_limit_c - outdoor).max(0.0);
            let n = 1.0 + noise * rng.gen_range(-1.0..1.0);
            p.heat_load[c][k] = ((space + params.dhw_base_kw[c] * dhw_shape) * n).max(0.0);
        }
    }
    p
}
