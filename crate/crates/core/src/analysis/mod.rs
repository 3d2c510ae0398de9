//! Downstream statistics: correlations with p-values and bootstrap CIs,
//! k-means clustering with silhouette/ARI/Kneedle selection, cluster
//! profiling, one-way ANOVA, and chi-square with standardized residuals.

mod cluster;
mod features;
mod stats;

pub use cluster::{
    adjusted_rand_index, cluster_profile, kmeans, kneedle_distance, select_k, silhouette, zscore, ClusterProfile,
    KMeansResult, SelectionRow, ZScored,
};
pub use features::{
    correlation_matrix, matrix_correlation, scene_feature_rows, CorrMatrix, SceneFeatureRow, FEATURE_NAMES,
};
pub use stats::{anova_oneway, bootstrap_ci, chi_square_residuals, pearson, Anova, ChiSquare, Correlation};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("inputs have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {need} observations, got {got}")]
    TooFewObservations { need: usize, got: usize },
    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),
    #[error("bootstrap needs at least 100 resamples, got {0}")]
    TooFewResamples(usize),
    #[error("confidence level must be in (0, 1), got {0}")]
    BadLevel(f64),
    #[error("too many degenerate bootstrap resamples")]
    DegenerateResamples,
    #[error("degenerate groups: {0}")]
    DegenerateGroups(String),
    #[error("zero margin in contingency table")]
    ZeroMargin,
    #[error("contingency table needs at least 2 rows and 2 columns")]
    TableTooSmall,
    #[error("k must be in [1, {n}], got {k}")]
    BadK { k: usize, n: usize },
    #[error("silhouette needs at least 2 non-empty clusters")]
    SingleCluster,
    #[error("k grid must be consecutive increasing with at least 3 points")]
    BadKGrid,
    #[error("fewer than 3 comparable cells between matrices")]
    TooFewCells,
    #[error("k range [{lo}, {hi}] not within [2, {max}]")]
    BadKRange { lo: usize, hi: usize, max: usize },
    #[error("empty input")]
    Empty,
}
