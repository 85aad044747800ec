//! First-order (Saltelli 2010) and total-effect (Jansen) Sobol indices from
//! a Saltelli design, with percentile-bootstrap confidence half-widths.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::par;
use crate::sampling::DesignMeta;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolOptions {
    /// Bootstrap resamples of the base-sample indices.
    pub resamples: usize,
    /// Two-sided confidence level of the reported half-widths.
    pub confidence: f64,
    /// Worker count for the bootstrap; 1 runs sequentially.
    pub jobs: usize,
}

impl Default for SobolOptions {
    fn default() -> Self {
        Self { resamples: 1000, confidence: 0.95, jobs: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorIndices {
    pub factor: String,
    pub s1: f64,
    pub s1_conf: f64,
    pub st: f64,
    pub st_conf: f64,
    /// False when `ST < S1 − S1_conf − ST_conf`, i.e. the estimates disagree
    /// beyond their intervals.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolResult {
    pub metric: String,
    pub n: usize,
    pub k: usize,
    pub variance: f64,
    pub factors: Vec<FactorIndices>,
}

impl SobolResult {
    pub fn get(&self, factor: &str) -> Option<&FactorIndices> {
        self.factors.iter().find(|f| f.factor == factor)
    }
}

/// Outputs of one Saltelli design split into its blocks.
struct Blocks<'a> {
    a: &'a [f64],
    b: &'a [f64],
    ab: Vec<&'a [f64]>,
}

fn split<'a>(meta: &DesignMeta, outputs: &'a [f64]) -> Result<(usize, Blocks<'a>), AnalysisError> {
    let DesignMeta::Saltelli { n, k, blocks, .. } = meta else {
        return Err(AnalysisError::Layout("Sobol indices need a Saltelli design".into()));
    };
    let (n, k) = (*n, *k);
    if outputs.len() != meta.run_count() {
        return Err(AnalysisError::Layout(format!(
            "{} outputs for a layout of {} runs",
            outputs.len(),
            meta.run_count()
        )));
    }
    let block = |label: &str| -> Result<&'a [f64], AnalysisError> {
        let b = blocks
            .iter()
            .find(|b| b.label == label)
            .ok_or_else(|| AnalysisError::Layout(format!("missing block {label}")))?;
        Ok(&outputs[b.start..b.start + n])
    };
    let ab = (0..k).map(|i| block(&format!("AB_{i}"))).collect::<Result<_, _>>()?;
    Ok((n, Blocks { a: block("A")?, b: block("B")?, ab }))
}

fn variance(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let (sum, count) = values.clone().fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    let mean = sum / count as f64;
    values.map(|v| (v - mean).powi(2)).sum::<f64>() / count as f64
}

/// (S1, ST) per factor over the base-sample rows `rows`.
fn estimate(blocks: &Blocks<'_>, rows: &[usize]) -> (f64, Vec<(f64, f64)>) {
    let v = variance(rows.iter().map(|&r| blocks.a[r]).chain(rows.iter().map(|&r| blocks.b[r])));
    let m = rows.len() as f64;
    let per_factor = blocks
        .ab
        .iter()
        .map(|ab| {
            let mut first = 0.0;
            let mut total = 0.0;
            for &r in rows {
                let (fa, fb, fab) = (blocks.a[r], blocks.b[r], ab[r]);
                first += fb * (fab - fa);
                total += (fa - fab).powi(2);
            }
            (first / m / v, total / m / (2.0 * v))
        })
        .collect();
    (v, per_factor)
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn half_width(mut samples: Vec<f64>, confidence: f64) -> f64 {
    samples.retain(|x| x.is_finite());
    if samples.len() < 2 {
        return 0.0;
    }
    samples.sort_by(f64::total_cmp);
    let alpha = (1.0 - confidence) / 2.0;
    0.5 * (quantile(&samples, 1.0 - alpha) - quantile(&samples, alpha)).max(0.0)
}

/// Sobol indices for one output column aligned with a Saltelli layout.
///
/// Resample indices are drawn from `rng` up front, so the result depends
/// only on the generator state and not on `opts.jobs`.
pub fn sobol_indices<R: Rng + ?Sized>(
    meta: &DesignMeta,
    factor_names: &[String],
    outputs: &[f64],
    metric: &str,
    opts: &SobolOptions,
    rng: &mut R,
) -> Result<SobolResult, AnalysisError> {
    let (n, blocks) = split(meta, outputs)?;
    let k = blocks.ab.len();
    if factor_names.len() != k {
        return Err(AnalysisError::Layout(format!("{} factor names for k = {k}", factor_names.len())));
    }
    if let Some(i) = outputs.iter().position(|v| !v.is_finite()) {
        return Err(AnalysisError::NonFinite { run: i });
    }
    let all: Vec<usize> = (0..n).collect();
    let (v, point) = estimate(&blocks, &all);
    if !(v > 0.0) {
        return Err(AnalysisError::ZeroVariance(metric.to_string()));
    }

    let draws: Vec<Vec<usize>> = (0..opts.resamples)
        .map(|_| (0..n).map(|_| rng.gen_range(0..n)).collect())
        .collect();
    let boot = par::map_ordered(&draws, opts.jobs, |rows| estimate(&blocks, rows).1);

    let factors = factor_names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let s1_conf = half_width(boot.iter().map(|b| b[i].0).collect(), opts.confidence);
            let st_conf = half_width(boot.iter().map(|b| b[i].1).collect(), opts.confidence);
            let (s1, st) = point[i];
            let consistent = st >= s1 - s1_conf - st_conf;
            if !consistent {
                log::warn!("{metric}/{name}: ST = {st:.4} below S1 = {s1:.4} beyond the intervals");
            }
            FactorIndices { factor: name.clone(), s1, s1_conf, st, st_conf, consistent }
        })
        .collect();

    Ok(SobolResult { metric: metric.to_string(), n, k, variance: v, factors })
}
