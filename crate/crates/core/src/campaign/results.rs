//! Reading campaign directories back for analysis.

use std::fs;
use std::path::{Path, PathBuf};

use super::{io_err, read_json_file, CampaignError, CampaignManifest, Provenance, RunStatus};
use crate::metrics::{metric_index, METRIC_NAMES};
use crate::sampling::CampaignDesign;
use crate::scenario::BenchmarkConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub run_id: u64,
    /// Factor values in column order.
    pub factors: Vec<f64>,
    /// Metric values in `METRIC_NAMES` order; `None` for failed runs.
    pub metrics: Option<[f64; 7]>,
    pub status: RunStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultsTable {
    pub provenance: Provenance,
    pub factors: Vec<String>,
    pub rows: Vec<ResultRow>,
}

impl ResultsTable {
    /// One metric across all rows; `None` for failed runs.
    pub fn metric_column(&self, metric: &str) -> Result<Vec<Option<f64>>, CampaignError> {
        let i = metric_index(metric).map_err(|e| CampaignError::Invalid(e.to_string()))?;
        Ok(self.rows.iter().map(|r| r.metrics.map(|m| m[i])).collect())
    }

    pub fn factor_column(&self, factor: &str) -> Option<Vec<f64>> {
        let i = self.factors.iter().position(|f| f == factor)?;
        Some(self.rows.iter().map(|r| r.factors[i]).collect())
    }

    pub fn failed_runs(&self) -> Vec<u64> {
        self.rows.iter().filter(|r| r.metrics.is_none()).map(|r| r.run_id).collect()
    }
}

fn parse_err(path: &Path, reason: impl Into<String>) -> CampaignError {
    CampaignError::Parse { path: path.to_path_buf(), reason: reason.into() }
}

/// Parses a `results.csv` file, including its provenance comment line.
pub fn read_results(path: impl AsRef<Path>) -> Result<ResultsTable, CampaignError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let (first, body) = text.split_once('\n').ok_or_else(|| parse_err(path, "empty file"))?;
    let provenance = Provenance::parse_header_line(first)
        .ok_or_else(|| parse_err(path, "line 1: expected `# config_hash=..,seed=..,version=..`"))?;

    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| parse_err(path, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let m = METRIC_NAMES.len();
    if header.len() < 2 + m || header[0] != "run_id" || header[header.len() - 1] != "status" {
        return Err(parse_err(path, "line 2: unexpected header"));
    }
    let nf = header.len() - 2 - m;
    if header[1 + nf..1 + nf + m].iter().zip(METRIC_NAMES).any(|(a, b)| a != b) {
        return Err(parse_err(path, "line 2: metric columns out of order"));
    }
    let factors = header[1..1 + nf].to_vec();

    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 3;
        let rec = rec.map_err(|e| parse_err(path, format!("line {line}: {e}")))?;
        let num = |s: &str| -> Result<f64, CampaignError> {
            s.parse::<f64>().map_err(|_| parse_err(path, format!("line {line}: bad number {s:?}")))
        };
        let run_id = rec[0].parse().map_err(|_| parse_err(path, format!("line {line}: bad run_id")))?;
        let fvals = (1..1 + nf).map(|j| num(&rec[j])).collect::<Result<Vec<_>, _>>()?;
        let status = match &rec[header.len() - 1] {
            "ok" => RunStatus::Ok,
            "failed" => RunStatus::Failed,
            s => return Err(parse_err(path, format!("line {line}: unknown status {s:?}"))),
        };
        let metrics = match status {
            RunStatus::Ok => {
                let mut v = [0.0; 7];
                for (j, slot) in v.iter_mut().enumerate() {
                    *slot = num(&rec[1 + nf + j])?;
                }
                Some(v)
            }
            RunStatus::Failed => None,
        };
        rows.push(ResultRow { run_id, factors: fvals, metrics, status });
    }
    Ok(ResultsTable { provenance, factors, rows })
}

/// A campaign directory read back with consistent provenance.
#[derive(Debug, Clone)]
pub struct LoadedCampaign {
    pub dir: PathBuf,
    pub config: BenchmarkConfig,
    pub design: CampaignDesign,
    pub table: ResultsTable,
}

/// Loads `config.json`, `design.json` and `results.csv` from `dir`, and
/// refuses the directory if their provenance does not line up.
pub fn load_campaign(dir: impl AsRef<Path>) -> Result<LoadedCampaign, CampaignError> {
    let dir = dir.as_ref();
    let config = BenchmarkConfig::load(dir.join("config.json"))?;
    let design = CampaignDesign::load(dir.join("design.json"))?;
    let table = read_results(dir.join("results.csv"))?;
    let hash = config.hash_hex();
    if table.provenance.config_hash != hash {
        return Err(CampaignError::Mismatch(format!(
            "results.csv was produced with config {}, but config.json hashes to {hash}",
            table.provenance.config_hash
        )));
    }
    let manifest_path = dir.join("campaign.json");
    if manifest_path.exists() {
        let manifest: CampaignManifest = read_json_file(&manifest_path)?;
        if manifest.provenance.config_hash != hash {
            return Err(CampaignError::Mismatch(format!(
                "campaign.json records config {}, but config.json hashes to {hash}",
                manifest.provenance.config_hash
            )));
        }
    }
    if table.rows.len() != design.len() {
        return Err(CampaignError::Mismatch(format!(
            "results.csv has {} rows, design has {} runs",
            table.rows.len(),
            design.len()
        )));
    }
    let names: Vec<&str> = design.factor_names();
    if table.factors.iter().map(String::as_str).ne(names.iter().copied()) {
        return Err(CampaignError::Mismatch("results.csv factor columns differ from design.json".into()));
    }
    for (i, row) in table.rows.iter().enumerate() {
        if row.run_id != i as u64 {
            return Err(CampaignError::Mismatch(format!("results.csv row {i} has run_id {}", row.run_id)));
        }
    }
    Ok(LoadedCampaign { dir: dir.to_path_buf(), config, design, table })
}
