//! Growth law, boom detection, Pareto split and baseline metrics.

mod fit;
mod growth;
mod metrics;
mod pagerank;
mod pareto;

pub use fit::{fit_linear, fit_quadratic, LinearFit, QuadraticFit};
pub use growth::{
    detect_boom, growth_point, growth_series, threshold_statistic, BoomOptions, BoomReport,
    BoomScale, BoomTarget, GrowthPoint, GrowthSeries,
};
pub use metrics::{average_ranks, h_index, rank_correlation, spearman};
pub use pagerank::{pagerank, PageRankOptions, RankDirection};
pub use pareto::{pareto_from_scores, pareto_split, ParetoReport};
