use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::resample::{resample_scores_with, Metric, ResamplingPlan};
use super::tests::{compare_sets, SignificanceTest};
use crate::embedding::{EmbeddingSet, SpaceTag};
use crate::entropy::{ensure_all_comparable, DiversityScore, EntropyOptions, ScoreKind};
use crate::error::{DiversityError, Result};

/// Attached to every report.
pub const OVERLAP_CAVEAT: &str =
    "subsets drawn from the same set overlap, so the per-set scores are \
not independent; p-values assume independence and are optimistic";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseEntry {
    pub set_a: String,
    pub set_b: String,
    pub statistic: f64,
    pub p_value: f64,
    pub significant_at: Vec<f64>,
}

/// Resampled score distributions for several sets plus every pairwise test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Scores per set, one per subset, in subset order.
    pub per_set: BTreeMap<String, Vec<f64>>,
    pub pairwise: Vec<PairwiseEntry>,
    pub test_used: SignificanceTest,
    #[serde(rename = "k")]
    pub k_used: usize,
    #[serde(rename = "space")]
    pub space_tag: SpaceTag,
    pub kind: ScoreKind,
    pub plan: ResamplingPlan,
    pub caveat: String,
}

impl ComparisonReport {
    pub fn mean(&self, set: &str) -> Option<f64> {
        self.per_set
            .get(set)
            .filter(|v| !v.is_empty())
            .map(|v| v.iter().sum::<f64>() / v.len() as f64)
    }

    /// The entry for an unordered pair of set names.
    pub fn pair(&self, a: &str, b: &str) -> Option<&PairwiseEntry> {
        self.pairwise
            .iter()
            .find(|e| (e.set_a == a && e.set_b == b) || (e.set_a == b && e.set_b == a))
    }
}

/// Resamples every named set under the same plan and compares all pairs in
/// input order.
pub fn compare_many(
    sets: &[(String, EmbeddingSet)],
    plan: &ResamplingPlan,
    k: usize,
    metric: Metric,
    test: SignificanceTest,
) -> Result<ComparisonReport> {
    compare_many_with(sets, plan, EntropyOptions::with_k(k), metric, test)
}

/// [`compare_many`] with explicit entropy options.
pub fn compare_many_with(
    sets: &[(String, EmbeddingSet)],
    plan: &ResamplingPlan,
    options: EntropyOptions,
    metric: Metric,
    test: SignificanceTest,
) -> Result<ComparisonReport> {
    let k = options.k;
    if sets.is_empty() {
        return Err(DiversityError::InvalidParameter(
            "no sets to compare".into(),
        ));
    }
    if plan.n_subsets < 2 && sets.len() > 1 {
        return Err(DiversityError::InvalidParameter(
            "significance tests need at least 2 subsets per set".into(),
        ));
    }
    let mut scores: Vec<(String, Vec<DiversityScore>)> = Vec::with_capacity(sets.len());
    for (name, set) in sets {
        if scores.iter().any(|(n, _)| n == name) {
            return Err(DiversityError::InvalidParameter(format!(
                "duplicate set name '{name}'"
            )));
        }
        let set_scores = resample_scores_with(set, plan, options, metric).map_err(|source| {
            DiversityError::InSet {
                name: name.clone(),
                source: Box::new(source),
            }
        })?;
        scores.push((name.clone(), set_scores));
    }
    ensure_all_comparable(scores.iter().flat_map(|(_, s)| s.iter()))?;

    let mut pairwise = Vec::new();
    for (i, (name_a, a)) in scores.iter().enumerate() {
        for (name_b, b) in &scores[i + 1..] {
            let r = compare_sets(a, b, test)?;
            pairwise.push(PairwiseEntry {
                set_a: name_a.clone(),
                set_b: name_b.clone(),
                statistic: r.statistic,
                p_value: r.p_value,
                significant_at: r.significant_at,
            });
        }
    }

    let first = scores[0].1[0];
    Ok(ComparisonReport {
        per_set: scores
            .into_iter()
            .map(|(name, s)| (name, s.into_iter().map(|x| x.value).collect()))
            .collect(),
        pairwise,
        test_used: test,
        k_used: k,
        space_tag: first.space_tag,
        kind: first.kind,
        plan: *plan,
        caveat: OVERLAP_CAVEAT.to_string(),
    })
}
