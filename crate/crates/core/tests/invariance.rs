mod common;

use common::{random_orthogonal, random_set, random_spd, rng};
use latent_diversity::spectrum::{compute_spectrum, SpectrumSource};
use latent_diversity::{
    compute_summary, diversity, truncated_entropy, CovarianceSummary, Denominator, EigenMethod,
    EmbeddingSet, EntropyOptions, SpaceTag,
};
use nalgebra::{DMatrix, DVector, RowDVector};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn score(set: &EmbeddingSet, k: usize) -> f64 {
    diversity(set, EntropyOptions::with_k(k)).unwrap().value
}

fn with_data(set: &EmbeddingSet, data: DMatrix<f64>) -> EmbeddingSet {
    EmbeddingSet::new(data, set.space_tag()).unwrap()
}

fn case() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 8usize..40, 3usize..48)
}

fn k_for(n: usize, d: usize) -> usize {
    (n - 1).min(d).min(6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn translation((seed, n, d) in case(), offset in 0.0f64..100.0) {
        let mut rng = rng(seed);
        let set = random_set(&mut rng, n, d);
        let t = RowDVector::from_fn(d, |_, _| rng.random_range(-offset..=offset));
        let mut moved = set.data().clone();
        for mut row in moved.row_iter_mut() {
            row += &t;
        }
        let k = k_for(n, d);
        let drift = (score(&set, k) - score(&with_data(&set, moved), k)).abs();
        prop_assert!(drift <= 1e-9, "drift {drift}");
    }

    #[test]
    fn rotation((seed, n, d) in case()) {
        let mut rng = rng(seed);
        let set = random_set(&mut rng, n, d);
        let q = random_orthogonal(&mut rng, d);
        let k = k_for(n, d);
        let rotated = with_data(&set, set.data() * q);
        let drift = (score(&set, k) - score(&rotated, k)).abs();
        prop_assert!(drift <= 1e-6, "drift {drift}");
    }

    #[test]
    fn scaling_law((seed, n, d) in case(), c in 0.05f64..20.0) {
        let mut rng = rng(seed);
        let set = random_set(&mut rng, n, d);
        let k = k_for(n, d);
        let scaled = with_data(&set, set.data() * c);
        let delta = score(&scaled, k) - score(&set, k);
        prop_assert!((delta - k as f64 * c.ln()).abs() <= 1e-6, "delta {delta}");
    }

    #[test]
    fn row_permutation((seed, n, d) in case()) {
        let mut rng = rng(seed);
        let set = random_set(&mut rng, n, d);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let permuted = set.select_rows(&order).unwrap();
        let k = k_for(n, d);
        let drift = (score(&set, k) - score(&permuted, k)).abs();
        prop_assert!(drift <= 1e-9, "drift {drift}");
    }

    #[test]
    fn inflating_covariance_raises_entropy(seed in any::<u64>(), d in 2usize..24, sigma in 0.01f64..3.0) {
        let mut rng = rng(seed);
        let cov = random_spd(&mut rng, d);
        let k = rng.random_range(1..=d);
        let entropy = |c: DMatrix<f64>| {
            let summary = CovarianceSummary::from_moments(DVector::zeros(d), c, 100, SpaceTag::Custom(d)).unwrap();
            let spectrum = compute_spectrum(&summary, EigenMethod::Dense).unwrap();
            truncated_entropy(&spectrum, k).unwrap().value
        };
        let base = entropy(cov.clone());
        let inflated = entropy(cov + DMatrix::identity(d, d) * sigma * sigma);
        prop_assert!(inflated > base, "{inflated} <= {base}");
    }

    #[test]
    fn summary_eigenvalues_are_nonnegative_and_sorted((seed, n, d) in case()) {
        let mut rng = rng(seed);
        let set = random_set(&mut rng, n, d);
        let spectrum = compute_spectrum(SpectrumSource::Set(&set, Denominator::NMinus1), EigenMethod::Auto).unwrap();
        prop_assert!(spectrum.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(spectrum.eigenvalues.iter().all(|&v| v >= 0.0));
        prop_assert!(spectrum.effective_rank <= (n - 1).min(d));
    }
}

#[test]
fn permuted_summary_matches_closely() {
    let mut rng = rng(77);
    let set = random_set(&mut rng, 30, 12);
    let reversed: Vec<usize> = (0..30).rev().collect();
    let a = compute_summary(&set, Denominator::NMinus1).unwrap();
    let b = compute_summary(&set.select_rows(&reversed).unwrap(), Denominator::NMinus1).unwrap();
    assert!((a.covariance - b.covariance).amax() < 1e-12);
    assert!((a.mean - b.mean).amax() < 1e-12);
}
