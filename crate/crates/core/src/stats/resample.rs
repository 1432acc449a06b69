use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingSet;
use crate::embedding::SpaceTag;
use crate::entropy::{diversity, DiversityScore, EntropyOptions};
use crate::error::{DiversityError, Result};

/// Random subsets drawn from one set.
///
/// Each subset is sampled without replacement; subsets are independent of
/// each other, so they may overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResamplingPlan {
    pub n_subsets: usize,
    pub subset_size: usize,
    pub seed: u64,
}

impl Default for ResamplingPlan {
    fn default() -> Self {
        ResamplingPlan {
            n_subsets: 10,
            subset_size: 30,
            seed: 0,
        }
    }
}

impl ResamplingPlan {
    pub fn new(n_subsets: usize, subset_size: usize, seed: u64) -> Self {
        ResamplingPlan {
            n_subsets,
            subset_size,
            seed,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.n_subsets == 0 {
            return Err(DiversityError::InvalidParameter(
                "n_subsets must be at least 1".into(),
            ));
        }
        if self.subset_size < 2 {
            return Err(DiversityError::InvalidParameter(
                "subset_size must be at least 2".into(),
            ));
        }
        if self.subset_size > n {
            return Err(DiversityError::InsufficientSamples {
                needed: self.subset_size,
                got: n,
            });
        }
        Ok(())
    }

    /// Sorted row indices of subset `subset`, drawn from `0..n`.
    ///
    /// Every subset has its own ChaCha stream keyed by `(seed, subset)`, so
    /// the draw does not depend on evaluation order.
    pub fn subset_indices(&self, n: usize, subset: usize) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(subset as u64);
        let mut rows = index::sample(&mut rng, n, self.subset_size).into_vec();
        rows.sort_unstable();
        rows
    }
}

/// Which score to compute on every subset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Requires `inception2048` sets.
    Tie,
    /// Requires `clip512` sets.
    Tce,
    /// Any space; the score kind follows the set's tag.
    #[default]
    Generic,
}

impl Metric {
    fn score(self, set: &EmbeddingSet, options: EntropyOptions) -> Result<DiversityScore> {
        let required = match self {
            Metric::Tie => Some(SpaceTag::Inception2048),
            Metric::Tce => Some(SpaceTag::Clip512),
            Metric::Generic => None,
        };
        match required {
            Some(tag) if tag != set.space_tag() => Err(DiversityError::SpaceMismatch(format!(
                "{self:?} needs {tag} embeddings, got {}",
                set.space_tag()
            ))),
            _ => diversity(set, options),
        }
    }
}

/// One score per subset, in subset order.
pub fn resample_scores(
    set: &EmbeddingSet,
    plan: &ResamplingPlan,
    k: usize,
    metric: Metric,
) -> Result<Vec<DiversityScore>> {
    resample_scores_with(set, plan, EntropyOptions::with_k(k), metric)
}

/// [`resample_scores`] with explicit denominator and eigen-solver route.
pub fn resample_scores_with(
    set: &EmbeddingSet,
    plan: &ResamplingPlan,
    options: EntropyOptions,
    metric: Metric,
) -> Result<Vec<DiversityScore>> {
    let k = options.k;
    plan.validate(set.n_samples())?;
    if k == 0 {
        return Err(DiversityError::InvalidParameter(
            "k must be at least 1".into(),
        ));
    }
    if k > plan.subset_size - 1 {
        return Err(DiversityError::RankDeficient {
            k,
            effective_rank: plan.subset_size - 1,
        });
    }
    let one = |subset: usize| {
        let rows = plan.subset_indices(set.n_samples(), subset);
        set.select_rows(&rows)
            .and_then(|sub| metric.score(&sub, options))
            .map_err(|source| DiversityError::InSubset {
                index: subset,
                source: Box::new(source),
            })
    };

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..plan.n_subsets).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..plan.n_subsets).map(one).collect()
    }
}
