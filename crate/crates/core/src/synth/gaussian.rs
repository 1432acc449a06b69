use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::embedding::{EmbeddingSet, SpaceTag};
use crate::entropy::gaussian_entropy;
use crate::error::{DiversityError, Result};

/// Population covariance `Q diag(λ) Qᵀ`, where `Q` (d x m) has orthonormal
/// columns drawn from `rotation_seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSpec {
    pub d: usize,
    /// Positive, sorted descending on construction.
    pub eigenvalues: Vec<f64>,
    pub rotation_seed: u64,
}

impl SpectrumSpec {
    pub fn new(d: usize, mut eigenvalues: Vec<f64>, rotation_seed: u64) -> Result<Self> {
        if eigenvalues.is_empty() || eigenvalues.len() > d {
            return Err(DiversityError::InvalidParameter(format!(
                "need between 1 and d = {d} eigenvalues, got {}",
                eigenvalues.len()
            )));
        }
        if eigenvalues.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(DiversityError::InvalidParameter(
                "population eigenvalues must be positive and finite".into(),
            ));
        }
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        Ok(SpectrumSpec {
            d,
            eigenvalues,
            rotation_seed,
        })
    }

    /// Truncated entropy of the population itself, over its k largest
    /// eigenvalues.
    pub fn population_entropy(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.eigenvalues.len() {
            return Err(DiversityError::RankDeficient {
                k,
                effective_rank: self.eigenvalues.len(),
            });
        }
        Ok(gaussian_entropy(&self.eigenvalues[..k]))
    }

    /// The d x m embedding with orthonormal columns.
    pub fn basis(&self) -> DMatrix<f64> {
        let m = self.eigenvalues.len();
        let mut rng = ChaCha8Rng::seed_from_u64(self.rotation_seed);
        let gaussian = DMatrix::from_fn(self.d, m, |_, _| StandardNormal.sample(&mut rng));
        gaussian.qr().q()
    }

    pub fn population_covariance(&self) -> DMatrix<f64> {
        let q = self.basis();
        let mut scaled = q.clone();
        for (mut col, &l) in scaled.column_iter_mut().zip(&self.eigenvalues) {
            col *= l;
        }
        scaled * q.transpose()
    }
}

/// Samples plus the spectrum they were drawn from.
#[derive(Debug, Clone)]
pub struct GaussianSample {
    pub set: EmbeddingSet,
    pub spec: SpectrumSpec,
}

impl GaussianSample {
    pub fn analytic_entropy(&self, k: usize) -> Result<f64> {
        self.spec.population_entropy(k)
    }
}

/// Draws n rows from `N(0, Q diag(λ) Qᵀ)`.
pub fn sample_gaussian(spec: &SpectrumSpec, n: usize, seed: u64) -> Result<GaussianSample> {
    if n < 2 {
        return Err(DiversityError::InsufficientSamples { needed: 2, got: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = spec.eigenvalues.len();
    let mut latent = DMatrix::<f64>::from_fn(n, m, |_, _| StandardNormal.sample(&mut rng));
    for (mut col, &l) in latent.column_iter_mut().zip(&spec.eigenvalues) {
        col *= l.sqrt();
    }
    let data = latent * spec.basis().transpose();
    Ok(GaussianSample {
        set: EmbeddingSet::new(data, SpaceTag::for_dimension(spec.d))?,
        spec: spec.clone(),
    })
}
