//! Post-processing of campaign outputs: Sobol indices with bootstrap
//! intervals, OAT rankings and polynomial meta-models.

mod metamodel;
mod oat;
mod sobol;

use thiserror::Error;

pub use metamodel::{coefficient_count, fit_metamodel, monomials, FitStats, MetaAxis, MetaModel, Prediction};
pub use oat::{oat_ranking, oat_ranking_partial, AggregateRank, FactorScore, MetricRanking, OatRanking};
pub use sobol::{sobol_indices, FactorIndices, SobolOptions, SobolResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("zero output variance for {0:?} (constant model)")]
    ZeroVariance(String),
    #[error("layout mismatch: {0}")]
    Layout(String),
    #[error("missing runs: {0:?}")]
    MissingRuns(Vec<u64>),
    #[error("non-finite output at run {run}")]
    NonFinite { run: usize },
    #[error("rank-deficient design matrix: rank {rank} of {columns} columns (duplicate or too few distinct points)")]
    RankDeficient { rank: usize, columns: usize },
    #[error("meta-model: {0}")]
    MetaModel(String),
}
