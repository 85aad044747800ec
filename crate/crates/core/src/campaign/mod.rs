//! Batch execution of a design against the simulator.
//!
//! Layout of a campaign directory:
//!
//! ```text
//! out/
//!   campaign.json        provenance and design fingerprint
//!   config.json          base configuration (after the seed override)
//!   design.json          the CampaignDesign
//!   results.csv          one row per run, ordered by run_id
//!   runs/<id>/metrics.json
//!   runs/<id>/trajectory.csv
//! ```
//!
//! A run counts as complete once its `metrics.json` exists, so rerunning a
//! campaign into the same directory only simulates what is missing.

mod analyze;
mod plots;
mod results;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use analyze::{
    analyze_metamodel, analyze_oat, analyze_sobol, MetaModelReport, Observation, RankingReport, SobolReport,
};
pub use plots::{emit_plots, plot_oat, plot_ranking, plot_sobol, plot_surface, PlotKind};
pub use results::{load_campaign, read_results, LoadedCampaign, ResultRow, ResultsTable};

use crate::analysis::AnalysisError;
use crate::metrics::{compute_metrics, MetricSet, METRIC_NAMES};
use crate::par;
use crate::sampling::{CampaignDesign, SamplingError};
use crate::scenario::{apply_recipe, is_bound_factor, load_profiles, BenchmarkConfig, Profiles, Recipe, ScenarioError};
use crate::sim::simulate_with_profiles;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{path}: {reason}")]
    Parse { path: PathBuf, reason: String },
}

impl CampaignError {
    /// True for errors caused by the inputs rather than by execution.
    pub fn is_validation(&self) -> bool {
        match self {
            CampaignError::Scenario(e) => e.is_validation(),
            CampaignError::Sampling(SamplingError::Scenario(e)) => e.is_validation(),
            CampaignError::Sampling(_)
            | CampaignError::Mismatch(_)
            | CampaignError::Invalid(_)
            | CampaignError::Parse { .. } => true,
            CampaignError::Analysis(e) => !matches!(e, AnalysisError::NonFinite { .. }),
            CampaignError::Io { .. } => false,
        }
    }
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CampaignError + '_ {
    move |source| CampaignError::Io { path: path.to_path_buf(), source }
}

/// Writes `contents` next to `path` and renames it into place.
pub(crate) fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CampaignError> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
    f.write_all(contents).map_err(io_err(&tmp))?;
    f.sync_all().map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

pub(crate) fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<(), CampaignError> {
    let mut text = serde_json::to_string_pretty(value).map_err(ScenarioError::from)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub(crate) fn read_json_file<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CampaignError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| CampaignError::Parse { path: path.to_path_buf(), reason: e.to_string() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampaignOptions {
    /// Worker count; 1 runs sequentially.
    pub jobs: usize,
    /// Overrides the config seed when set.
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    /// Write `runs/<id>/trajectory.csv` for every run.
    pub write_trajectories: bool,
}

impl CampaignOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self { jobs: par::default_jobs(), seed: None, out_dir: out_dir.into(), write_trajectories: true }
    }

    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

impl Provenance {
    pub fn for_config(config: &BenchmarkConfig) -> Self {
        Self { config_hash: config.hash_hex(), seed: config.seed, version: TOOL_VERSION.to_string() }
    }

    /// The comment line that opens `results.csv`.
    pub fn header_line(&self) -> String {
        format!("# config_hash={},seed={},version={}", self.config_hash, self.seed, self.version)
    }

    pub fn parse_header_line(line: &str) -> Option<Self> {
        let body = line.strip_prefix('#')?.trim();
        let mut hash = None;
        let mut seed = None;
        let mut version = None;
        for part in body.split(',') {
            let (k, v) = part.split_once('=')?;
            match k.trim() {
                "config_hash" => hash = Some(v.trim().to_string()),
                "seed" => seed = v.trim().parse().ok(),
                "version" => version = Some(v.trim().to_string()),
                _ => {}
            }
        }
        Some(Self { config_hash: hash?, seed: seed?, version: version? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Failed,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::Failed => "failed",
        }
    }
}

/// Outcome of one run; stored as `runs/<id>/metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: u64,
    pub design_tag: String,
    /// Stable hash of (campaign seed, run_id), kept for provenance.
    pub run_seed: u64,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricSet>,
}

impl RunRecord {
    pub fn is_ok(&self) -> bool {
        self.status == RunStatus::Ok
    }
}

/// Manifest written to `campaign.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignManifest {
    pub provenance: Provenance,
    pub design_hash: String,
    pub runs: usize,
    pub factors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub design: CampaignDesign,
    pub provenance: Provenance,
    /// One record per design run, indexed by run_id.
    pub runs: Vec<RunRecord>,
    /// Runs simulated in this invocation (the rest were resumed from disk).
    pub executed: usize,
}

impl CampaignResult {
    pub fn failed(&self) -> impl Iterator<Item = &RunRecord> {
        self.runs.iter().filter(|r| !r.is_ok())
    }

    /// One metric across all runs; `None` for failed runs.
    pub fn metric_column(&self, metric: &str) -> Result<Vec<Option<f64>>, CampaignError> {
        let i = crate::metrics::metric_index(metric).map_err(|e| CampaignError::Invalid(e.to_string()))?;
        Ok(self.runs.iter().map(|r| r.metrics.map(|m| m.values()[i])).collect())
    }

    pub fn results_csv(&self) -> String {
        results_csv(&self.design, &self.provenance, &self.runs)
    }
}

/// Stable per-run seed: the first eight bytes of SHA-256(seed ‖ run_id).
pub fn run_seed(campaign_seed: u64, run_id: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(campaign_seed.to_le_bytes());
    h.update(run_id.to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}

fn design_hash(design: &CampaignDesign) -> String {
    let json = serde_json::to_string(design).expect("design serialises");
    Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub(crate) fn fmt_f64(v: f64) -> String {
    // Display is the shortest representation that round-trips.
    format!("{v}")
}

fn results_csv(design: &CampaignDesign, prov: &Provenance, runs: &[RunRecord]) -> String {
    let factors = design.factor_names();
    let mut out = prov.header_line();
    out.push('\n');
    out.push_str("run_id");
    for f in &factors {
        out.push(',');
        out.push_str(f);
    }
    for m in METRIC_NAMES {
        out.push(',');
        out.push_str(m);
    }
    out.push_str(",status\n");
    for (recipe, run) in design.recipes.iter().zip(runs) {
        out.push_str(&recipe.run_id.to_string());
        for f in &factors {
            out.push(',');
            out.push_str(&recipe.get(f).map(fmt_f64).unwrap_or_default());
        }
        match run.metrics {
            Some(m) => {
                for v in m.values() {
                    out.push(',');
                    out.push_str(&fmt_f64(v));
                }
            }
            None => out.push_str(&",".repeat(METRIC_NAMES.len())),
        }
        out.push(',');
        out.push_str(run.status.as_str());
        out.push('\n');
    }
    out
}

fn run_dir(out: &Path, run_id: u64) -> PathBuf {
    out.join("runs").join(run_id.to_string())
}

/// Simulates one recipe and writes its run directory.
fn execute(
    config: &BenchmarkConfig,
    profiles: &Profiles,
    recipe: &Recipe,
    dir: &Path,
    write_trajectory: bool,
) -> Result<RunRecord, CampaignError> {
    let mut record = RunRecord {
        run_id: recipe.run_id,
        design_tag: recipe.design_tag.clone(),
        run_seed: run_seed(config.seed, recipe.run_id),
        status: RunStatus::Ok,
        reason: None,
        metrics: None,
    };
    let outcome = apply_recipe(config, recipe)
        .map_err(|e| e.to_string())
        .and_then(|c| simulate_with_profiles(&c, profiles).map(|t| (c, t)).map_err(|e| e.to_string()))
        .and_then(|(c, t)| compute_metrics(&t, c.step_s as f64).map(|m| (t, m)).map_err(|e| e.to_string()));
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    match outcome {
        Ok((traj, metrics)) => {
            if write_trajectory {
                write_atomic(&dir.join("trajectory.csv"), traj.to_csv().as_bytes())?;
            }
            record.metrics = Some(metrics);
        }
        Err(reason) => {
            log::warn!("run {} failed: {reason}", recipe.run_id);
            record.status = RunStatus::Failed;
            record.reason = Some(reason);
        }
    }
    // metrics.json is the completion marker, so it goes last
    write_json_file(&dir.join("metrics.json"), &record)?;
    Ok(record)
}

fn resume(dir: &Path, recipe: &Recipe) -> Option<RunRecord> {
    let path = dir.join("metrics.json");
    if !path.exists() {
        return None;
    }
    match read_json_file::<RunRecord>(&path) {
        Ok(r) if r.run_id == recipe.run_id && r.design_tag == recipe.design_tag && r.is_ok() == r.metrics.is_some() => {
            Some(r)
        }
        Ok(_) => {
            log::warn!("{} does not match its recipe; rerunning", path.display());
            None
        }
        Err(e) => {
            log::warn!("{e}; rerunning");
            None
        }
    }
}

/// Runs every recipe of `design` against `base_config`.
///
/// All runs share the same profiles (the config seed, optionally overridden
/// by `opts.seed`), so differences between rows come from the recipes
/// alone. Results are independent of `opts.jobs`. A run that fails is
/// recorded as failed and the campaign continues.
pub fn run_campaign(
    design: &CampaignDesign,
    base_config: &BenchmarkConfig,
    opts: &CampaignOptions,
) -> Result<CampaignResult, CampaignError> {
    design.validate()?;
    if let Some(f) = design.factors.iter().find(|f| !is_bound_factor(&f.name)) {
        return Err(ScenarioError::UnknownFactor(f.name.clone()).into());
    }
    let mut config = base_config.clone();
    if let Some(seed) = opts.seed {
        config.seed = seed;
    }
    config.validate()?;

    let out = &opts.out_dir;
    fs::create_dir_all(out.join("runs")).map_err(io_err(out))?;
    let provenance = Provenance::for_config(&config);
    let manifest = CampaignManifest {
        provenance: provenance.clone(),
        design_hash: design_hash(design),
        runs: design.len(),
        factors: design.factor_names().iter().map(|s| s.to_string()).collect(),
    };
    let manifest_path = out.join("campaign.json");
    if manifest_path.exists() {
        let old: CampaignManifest = read_json_file(&manifest_path)?;
        if old.provenance.config_hash != manifest.provenance.config_hash {
            return Err(CampaignError::Mismatch(format!(
                "{} holds a campaign for config {}, not {}",
                out.display(),
                old.provenance.config_hash,
                manifest.provenance.config_hash
            )));
        }
        if old.design_hash != manifest.design_hash {
            return Err(CampaignError::Mismatch(format!("{} holds a different design", out.display())));
        }
    }
    write_json_file(&manifest_path, &manifest)?;
    write_json_file(&out.join("config.json"), &config)?;
    design.save(out.join("design.json"))?;

    let profiles = load_profiles(&config)?;
    let outcomes = par::map_ordered(&design.recipes, opts.jobs.max(1), |recipe| {
        let dir = run_dir(out, recipe.run_id);
        match resume(&dir, recipe) {
            Some(r) => Ok((r, false)),
            None => execute(&config, &profiles, recipe, &dir, opts.write_trajectories).map(|r| (r, true)),
        }
    });
    let mut runs = Vec::with_capacity(outcomes.len());
    let mut executed = 0;
    for o in outcomes {
        let (r, fresh) = o?;
        executed += usize::from(fresh);
        runs.push(r);
    }
    let result = CampaignResult { design: design.clone(), provenance, runs, executed };
    write_atomic(&out.join("results.csv"), result.results_csv().as_bytes())?;
    let failed = result.failed().count();
    log::info!(
        "campaign: {} runs ({} executed, {} resumed, {failed} failed) in {}",
        result.runs.len(),
        executed,
        result.runs.len() - executed,
        out.display()
    );
    Ok(result)
}

/// Simulates a single recipe into `out_dir` (`trajectory.csv`, `metrics.json`).
pub fn run_single(config: &BenchmarkConfig, recipe: &Recipe, out_dir: &Path) -> Result<RunRecord, CampaignError> {
    config.validate()?;
    let cfg = apply_recipe(config, recipe)?;
    cfg.validate()?;
    let profiles = load_profiles(&cfg)?;
    execute(&cfg, &profiles, recipe, out_dir, true)
}
