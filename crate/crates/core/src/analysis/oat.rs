//! OAT screening ranking.
//!
//! For each metric a factor scores the population variance of the metric
//! over its (min, base, max) runs. Factors are ranked by descending score
//! with ties broken by name, and the aggregate is the mean rank across
//! metrics.

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::sampling::DesignMeta;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorScore {
    pub factor: String,
    pub rank: usize,
    pub score: f64,
    /// Metric at the factor's min, base and max runs.
    pub min_value: f64,
    pub base_value: f64,
    pub max_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRanking {
    pub metric: String,
    pub ranking: Vec<FactorScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRank {
    pub factor: String,
    pub mean_rank: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OatRanking {
    pub metrics: Vec<MetricRanking>,
    pub aggregate: Vec<AggregateRank>,
}

impl OatRanking {
    pub fn metric(&self, name: &str) -> Option<&MetricRanking> {
        self.metrics.iter().find(|m| m.metric == name)
    }

    pub fn rank_of(&self, metric: &str, factor: &str) -> Option<usize> {
        self.metric(metric)?.ranking.iter().find(|s| s.factor == factor).map(|s| s.rank)
    }
}

fn population_variance(v: &[f64]) -> f64 {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64
}

/// Ranks factors per metric. `outputs` holds, per metric, one value per run
/// (indexed by run id); `None` marks a failed run and is an error.
pub fn oat_ranking(meta: &DesignMeta, outputs: &[(String, Vec<Option<f64>>)]) -> Result<OatRanking, AnalysisError> {
    rank(meta, outputs, &[])
}

/// Like [`oat_ranking`], but factors whose triple touches a failed run are
/// left out. Returns the ranking and the names of the dropped factors.
pub fn oat_ranking_partial(
    meta: &DesignMeta,
    outputs: &[(String, Vec<Option<f64>>)],
) -> Result<(OatRanking, Vec<String>), AnalysisError> {
    let DesignMeta::Oat { triples } = meta else {
        return Err(AnalysisError::Layout("OAT ranking needs an OAT design".into()));
    };
    let missing = |id: u64| outputs.iter().any(|(_, v)| v.get(id as usize).is_none_or(Option::is_none));
    let dropped: Vec<String> = triples
        .iter()
        .filter(|t| missing(t.base_run) || missing(t.min_run) || missing(t.max_run))
        .map(|t| t.factor.clone())
        .collect();
    if !triples.is_empty() && dropped.len() == triples.len() {
        return Err(AnalysisError::MissingRuns(
            (0..meta.run_count() as u64).filter(|&id| missing(id)).collect(),
        ));
    }
    Ok((rank(meta, outputs, &dropped)?, dropped))
}

fn rank(meta: &DesignMeta, outputs: &[(String, Vec<Option<f64>>)], skip: &[String]) -> Result<OatRanking, AnalysisError> {
    let DesignMeta::Oat { triples } = meta else {
        return Err(AnalysisError::Layout("OAT ranking needs an OAT design".into()));
    };
    let runs = meta.run_count();
    let mut metrics = Vec::with_capacity(outputs.len());
    for (metric, values) in outputs {
        if values.len() != runs {
            return Err(AnalysisError::Layout(format!("{metric}: {} values for {runs} runs", values.len())));
        }
        let mut missing = Vec::new();
        let mut scores: Vec<FactorScore> = Vec::with_capacity(triples.len());
        for t in triples.iter().filter(|t| !skip.contains(&t.factor)) {
            let get = |id: u64| values[id as usize].ok_or(id);
            match (get(t.min_run), get(t.base_run), get(t.max_run)) {
                (Ok(lo), Ok(base), Ok(hi)) => scores.push(FactorScore {
                    factor: t.factor.clone(),
                    rank: 0,
                    score: population_variance(&[lo, base, hi]),
                    min_value: lo,
                    base_value: base,
                    max_value: hi,
                }),
                (a, b, c) => missing.extend([a.err(), b.err(), c.err()].into_iter().flatten()),
            }
        }
        if !missing.is_empty() {
            missing.sort_unstable();
            missing.dedup();
            return Err(AnalysisError::MissingRuns(missing));
        }
        scores.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.factor.cmp(&b.factor)));
        for (i, s) in scores.iter_mut().enumerate() {
            s.rank = i + 1;
        }
        metrics.push(MetricRanking { metric: metric.clone(), ranking: scores });
    }

    let mut aggregate: Vec<AggregateRank> = triples
        .iter()
        .filter(|t| !skip.contains(&t.factor))
        .map(|t| {
            let ranks: Vec<usize> = metrics
                .iter()
                .filter_map(|m| m.ranking.iter().find(|s| s.factor == t.factor).map(|s| s.rank))
                .collect();
            AggregateRank {
                factor: t.factor.clone(),
                mean_rank: if ranks.is_empty() { 0.0 } else { ranks.iter().sum::<usize>() as f64 / ranks.len() as f64 },
            }
        })
        .collect();
    aggregate.sort_by(|a, b| a.mean_rank.total_cmp(&b.mean_rank).then_with(|| a.factor.cmp(&b.factor)));
    Ok(OatRanking { metrics, aggregate })
}
