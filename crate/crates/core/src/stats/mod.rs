//! Resampled score distributions and between-set significance tests.

mod report;
mod resample;
mod tests;

pub use report::{
    compare_many, compare_many_with, ComparisonReport, PairwiseEntry, OVERLAP_CAVEAT,
};
pub use resample::{resample_scores, resample_scores_with, Metric, ResamplingPlan};
pub use tests::{
    compare_sets, mann_whitney_exact_cdf, mann_whitney_u, welch_t, PairwiseResult,
    SignificanceTest, TestOutcome, EXACT_MAX_GROUP, SIGNIFICANCE_LEVELS,
};
