#![allow(dead_code)]

use latent_diversity::{EmbeddingSet, SpaceTag};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Gaussian rows with per-column scales drawn from [0.2, 5), so spectra are
/// spread out rather than flat.
pub fn random_set(rng: &mut ChaCha8Rng, n: usize, d: usize) -> EmbeddingSet {
    let scales: Vec<f64> = (0..d).map(|_| rng.random_range(0.2..5.0)).collect();
    let mut data = gaussian_matrix(rng, n, d);
    for (j, s) in scales.iter().enumerate() {
        data.column_mut(j).scale_mut(*s);
    }
    EmbeddingSet::new(data, SpaceTag::Custom(d)).unwrap()
}

pub fn random_orthogonal(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    gaussian_matrix(rng, d, d).qr().q()
}

pub fn random_spd(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let a = gaussian_matrix(rng, d, d);
    &a * a.transpose() / d as f64 + DMatrix::identity(d, d) * 0.5
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
