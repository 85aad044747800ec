//! Analysis of a loaded campaign into the JSON reports.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CampaignError, LoadedCampaign};
use crate::analysis::{
    fit_metamodel, oat_ranking_partial, sobol_indices, AnalysisError, MetaAxis, MetaModel, OatRanking, SobolOptions,
    SobolResult,
};
use crate::metrics::{metric_index, METRIC_NAMES, TABLE_METRICS};
use crate::sampling::{DesignKind, DesignMeta};

/// Contents of `analysis.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolReport {
    pub config_hash: String,
    pub bootstrap_seed: u64,
    pub resamples: usize,
    pub confidence: f64,
    pub results: Vec<SobolResult>,
    /// Metrics left out because they did not vary over the design.
    #[serde(default)]
    pub skipped: Vec<String>,
}

/// Contents of `ranking.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingReport {
    pub config_hash: String,
    /// Factors left out because one of their runs failed.
    #[serde(default)]
    pub dropped: Vec<String>,
    #[serde(flatten)]
    pub ranking: OatRanking,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub x: Vec<f64>,
    pub y: f64,
}

/// Contents of `metamodel.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaModelReport {
    pub config_hash: String,
    pub metric: String,
    #[serde(flatten)]
    pub model: MetaModel,
    /// Grid values per axis, ascending.
    pub grid: Vec<Vec<f64>>,
    pub observations: Vec<Observation>,
}

fn check_metrics(metrics: &[String]) -> Result<(), CampaignError> {
    for m in metrics {
        metric_index(m).map_err(|e| CampaignError::Invalid(e.to_string()))?;
    }
    Ok(())
}

/// Sobol indices for `metrics` (all metrics when empty).
///
/// Every Saltelli row must be present; a failed run is a hard error since
/// the estimators need complete blocks. In all-metrics mode, metrics that
/// are constant over the design are skipped rather than reported.
pub fn analyze_sobol(
    campaign: &LoadedCampaign,
    metrics: &[String],
    opts: &SobolOptions,
    seed: u64,
) -> Result<SobolReport, CampaignError> {
    if campaign.design.kind != DesignKind::Saltelli {
        return Err(CampaignError::Invalid("Sobol analysis needs a Saltelli campaign".into()));
    }
    check_metrics(metrics)?;
    let failed = campaign.table.failed_runs();
    if !failed.is_empty() {
        return Err(AnalysisError::MissingRuns(failed).into());
    }
    let explicit = !metrics.is_empty();
    let names: Vec<String> = if explicit {
        metrics.to_vec()
    } else {
        METRIC_NAMES.iter().map(|s| s.to_string()).collect()
    };
    let factor_names = campaign.table.factors.clone();
    let mut results = Vec::new();
    let mut skipped = Vec::new();
    for name in names {
        let column: Vec<f64> = campaign.table.metric_column(&name)?.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(metric_index(&name).expect("checked") as u64);
        match sobol_indices(&campaign.design.meta, &factor_names, &column, &name, opts, &mut rng) {
            Ok(r) => results.push(r),
            Err(AnalysisError::ZeroVariance(m)) if !explicit => {
                log::warn!("{m} is constant over the design; skipped");
                skipped.push(m);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(SobolReport {
        config_hash: campaign.table.provenance.config_hash.clone(),
        bootstrap_seed: seed,
        resamples: opts.resamples,
        confidence: opts.confidence,
        results,
        skipped,
    })
}

/// OAT ranking for `metrics` (the six table metrics when empty). Factors
/// touched by a failed run are dropped with a warning.
pub fn analyze_oat(campaign: &LoadedCampaign, metrics: &[String]) -> Result<RankingReport, CampaignError> {
    if campaign.design.kind != DesignKind::Oat {
        return Err(CampaignError::Invalid("OAT ranking needs an OAT campaign".into()));
    }
    check_metrics(metrics)?;
    let names: Vec<String> = if metrics.is_empty() {
        TABLE_METRICS.iter().map(|s| s.to_string()).collect()
    } else {
        metrics.to_vec()
    };
    let outputs = names
        .iter()
        .map(|m| Ok((m.clone(), campaign.table.metric_column(m)?)))
        .collect::<Result<Vec<_>, CampaignError>>()?;
    let (ranking, dropped) = oat_ranking_partial(&campaign.design.meta, &outputs)?;
    if !dropped.is_empty() {
        log::warn!("failed runs: factors {dropped:?} left out of the ranking");
    }
    Ok(RankingReport { config_hash: campaign.table.provenance.config_hash.clone(), dropped, ranking })
}

/// Polynomial meta-model of `metric` over the axes of a grid campaign.
/// Failed grid points are left out with a warning.
pub fn analyze_metamodel(campaign: &LoadedCampaign, metric: &str, degree: u32) -> Result<MetaModelReport, CampaignError> {
    let DesignMeta::Grid { axes, .. } = &campaign.design.meta else {
        return Err(CampaignError::Invalid("meta-models need a grid campaign".into()));
    };
    let column = campaign.table.metric_column(metric)?;
    let mut observations = Vec::new();
    for (recipe, y) in campaign.design.recipes.iter().zip(&column) {
        let Some(y) = *y else { continue };
        let x = axes
            .iter()
            .map(|a| recipe.get(&a.name).ok_or_else(|| CampaignError::Mismatch(format!("recipe lacks {}", a.name))))
            .collect::<Result<Vec<f64>, _>>()?;
        observations.push(Observation { x, y });
    }
    let failed = column.len() - observations.len();
    if failed > 0 {
        log::warn!("{failed} failed grid points left out of the fit");
    }
    let xs: Vec<Vec<f64>> = observations.iter().map(|o| o.x.clone()).collect();
    let ys: Vec<f64> = observations.iter().map(|o| o.y).collect();
    let meta_axes = axes.iter().map(|a| MetaAxis::new(&a.name, a.min, a.max)).collect();
    let model = fit_metamodel(&xs, &ys, meta_axes, degree)?;
    Ok(MetaModelReport {
        config_hash: campaign.table.provenance.config_hash.clone(),
        metric: metric.to_string(),
        model,
        grid: axes.iter().map(|a| a.values.clone()).collect(),
        observations,
    })
}
