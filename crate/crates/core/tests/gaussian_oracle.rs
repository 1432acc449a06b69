mod common;

use common::{gaussian_matrix, rng};
use latent_diversity::entropy::ln_two_pi_e;
use latent_diversity::synth::{sample_gaussian, SpectrumSpec};
use latent_diversity::{
    compute_summary, diversity, Denominator, EmbeddingSet, EntropyOptions, SpaceTag,
};
use nalgebra::DMatrix;

const ANALYTIC_941: f64 = 6.048575;

#[test]
fn analytic_value_for_941() {
    let exact = 1.5 * ln_two_pi_e() + 0.5 * 36f64.ln();
    assert!((exact - ANALYTIC_941).abs() < 5e-7);
    let spec = SpectrumSpec::new(512, vec![9.0, 4.0, 1.0], 3).unwrap();
    assert!((spec.population_entropy(3).unwrap() - exact).abs() < 1e-12);
}

#[test]
fn sampled_covariance_of_diag_941() {
    let mut rng = rng(0);
    let scale = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 2.0, 1.0]));
    let data = gaussian_matrix(&mut rng, 200, 3) * scale;
    let set = EmbeddingSet::new(data, SpaceTag::Custom(3)).unwrap();
    let cov = compute_summary(&set, Denominator::NMinus1)
        .unwrap()
        .covariance;
    let target: [f64; 3] = [9.0, 4.0, 1.0];
    for i in 0..3 {
        for j in 0..3 {
            let bound = 0.2 * (target[i] * target[j]).sqrt();
            let want = if i == j { target[i] } else { 0.0 };
            assert!(
                (cov[(i, j)] - want).abs() <= bound,
                "({i},{j}) = {}",
                cov[(i, j)]
            );
        }
    }
}

#[test]
fn embedded_941_band_at_n200() {
    // 100 replications: median relative error 0.85%, worst 3.2%
    let spec = SpectrumSpec::new(512, vec![9.0, 4.0, 1.0], 11).unwrap();
    let mut errors: Vec<f64> = (0..100)
        .map(|seed| {
            let sample = sample_gaussian(&spec, 200, seed).unwrap();
            let v = diversity(&sample.set, EntropyOptions::with_k(3))
                .unwrap()
                .value;
            (v - ANALYTIC_941).abs() / ANALYTIC_941
        })
        .collect();
    errors.sort_by(f64::total_cmp);
    assert!(errors[49] < 0.015, "median {}", errors[49]);
    assert!(errors[94] < 0.04, "95th percentile {}", errors[94]);
}

#[test]
fn estimate_converges_to_population_value() {
    let spec = SpectrumSpec::new(64, vec![9.0, 4.0, 1.0], 4).unwrap();
    let truth = spec.population_entropy(3).unwrap();
    let median_error = |n: usize| {
        let mut errs: Vec<f64> = (0..100)
            .map(|seed| {
                let s = sample_gaussian(&spec, n, 1000 + seed).unwrap();
                (diversity(&s.set, EntropyOptions::with_k(3)).unwrap().value - truth).abs()
            })
            .collect();
        errs.sort_by(f64::total_cmp);
        errs[50]
    };
    let e: Vec<f64> = [50, 200, 1000].into_iter().map(median_error).collect();
    assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
}

#[test]
fn duplicating_rows_only_moves_the_denominator() {
    let spec = SpectrumSpec::new(128, (1..=40).map(|i| 1.0 / i as f64).collect(), 8).unwrap();
    for n in [30, 120] {
        let set = sample_gaussian(&spec, n, 5).unwrap().set;
        let doubled = EmbeddingSet::concat(&[set.clone(), set.clone()]).unwrap();
        for denominator in [Denominator::N, Denominator::NMinus1] {
            let opts = EntropyOptions {
                denominator,
                ..EntropyOptions::with_k(20)
            };
            let shift =
                diversity(&doubled, opts).unwrap().value - diversity(&set, opts).unwrap().value;
            let expected = match denominator {
                Denominator::N => 0.0,
                Denominator::NMinus1 => {
                    10.0 * (2.0 * (n as f64 - 1.0) / (2.0 * n as f64 - 1.0)).ln()
                }
            };
            assert!(
                (shift - expected).abs() < 1e-9,
                "n={n} {denominator}: {shift} vs {expected}"
            );
        }
    }
    // above roughly a hundred rows the unbiased shift drops under 0.05 nats
    assert!((10.0f64 * (238.0f64 / 239.0).ln()).abs() < 0.05);
}

#[test]
fn doubling_spectrum_adds_half_k_ln2() {
    let a = SpectrumSpec::new(10, vec![5.0, 3.0, 2.0, 0.5], 1).unwrap();
    let b = SpectrumSpec::new(10, vec![10.0, 6.0, 4.0, 1.0], 1).unwrap();
    for k in 1..=4 {
        let diff = b.population_entropy(k).unwrap() - a.population_entropy(k).unwrap();
        assert!((diff - 0.5 * k as f64 * 2f64.ln()).abs() < 1e-12);
    }
}
