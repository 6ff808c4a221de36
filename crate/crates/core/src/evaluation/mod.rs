//! The experimental protocol: cross-validated grid search, seed repetition,
//! accuracy summaries, average ranks and Wilcoxon signed-rank comparisons.

mod cv;
mod grid;
mod metrics;
mod report;
mod stats;

pub use cv::{cross_validate, repeat_runs, run_cv, sweep, Experiment, Protocol, RunResult, SweepParam};
pub use grid::{GridSpec, Variant};
pub use metrics::{accuracy, mean_std};
pub use report::{paired_means, ComparisonReport, PairwiseTest, SIGNIFICANCE};
pub use stats::{
    average_ranks, average_ranks_ascending, rank_column, wilcoxon_signed_rank, WilcoxonResult, EXACT_MAX_PAIRS,
};
