//! Fréchet distance between Gaussian fits of two embedding sets (FID when the
//! embeddings are InceptionV3 activations).
//!
//! `FD = |μ₁-μ₂|² + tr Σ₁ + tr Σ₂ - 2 tr (Σ₁^{1/2} Σ₂ Σ₁^{1/2})^{1/2}`
//!
//! The trace of the square root of the symmetrized product equals the sum of
//! the singular values of `F₁ F₂ᵀ` for any factors with `Σᵢ = FᵢᵀFᵢ`. The
//! singular values are evaluated directly, so null directions of rank
//! deficient covariances contribute `O(ε‖Σ‖)` instead of `O(√ε‖Σ‖)`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::covariance::{center, compute_summary, CovarianceSummary, Denominator};
use crate::embedding::{EmbeddingSet, SpaceTag};
use crate::error::{DiversityError, Result};

/// Diagonal jitter added on the single retry after a failed square root.
pub const SQRTM_JITTER: f64 = 1e-6;
/// Eigenvalues of an input covariance below `-NEGATIVE_TOLERANCE * λ_max`
/// mean the matrix is not positive semidefinite.
pub const NEGATIVE_TOLERANCE: f64 = 1e-8;

const MAX_SOLVER_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidScore {
    pub value: f64,
    #[serde(rename = "space")]
    pub space_tag: SpaceTag,
    pub n_ref: usize,
    pub n_gen: usize,
    pub sqrtm_jitter: f64,
}

/// Fréchet distance between two Gaussian summaries.
pub fn frechet_distance(
    reference: &CovarianceSummary,
    generated: &CovarianceSummary,
) -> Result<FidScore> {
    check_compatible(
        reference.space_tag,
        reference.dim(),
        generated.space_tag,
        generated.dim(),
    )?;
    let mean_term = (&reference.mean - &generated.mean).norm_squared();
    let (value, jitter) = with_retry(|jitter| {
        let f1 = covariance_factor(&reference.covariance, jitter)?;
        let f2 = covariance_factor(&generated.covariance, jitter)?;
        let traces = reference.covariance.trace()
            + generated.covariance.trace()
            + 2.0 * jitter * reference.dim() as f64;
        Ok(traces - 2.0 * nuclear_norm(&(&f1 * f2.transpose()))?)
    })?;
    Ok(FidScore {
        value: (mean_term + value).max(0.0),
        space_tag: reference.space_tag,
        n_ref: reference.n_samples,
        n_gen: generated.n_samples,
        sqrtm_jitter: jitter,
    })
}

/// Fréchet distance computed straight from the samples.
///
/// The centred data are themselves covariance factors, so the square-root
/// trace reduces to the singular values of an `N_ref x N_gen` matrix and the
/// `D x D` covariances are never formed. Falls back to the summary route
/// (with its jitter retry) if that fails.
pub fn frechet_distance_sets(
    reference: &EmbeddingSet,
    generated: &EmbeddingSet,
    denominator: Denominator,
) -> Result<FidScore> {
    check_compatible(
        reference.space_tag(),
        reference.dim(),
        generated.space_tag(),
        generated.dim(),
    )?;
    for set in [reference, generated] {
        if set.n_samples() < 2 {
            return Err(DiversityError::InsufficientSamples {
                needed: 2,
                got: set.n_samples(),
            });
        }
    }
    let factor = |set: &EmbeddingSet| {
        let (mean, centered) = center(set.data());
        (mean, centered / denominator.value(set.n_samples()).sqrt())
    };
    let (m1, f1) = factor(reference);
    let (m2, f2) = factor(generated);
    let direct = nuclear_norm(&(&f1 * f2.transpose())).map(|cross| {
        let traces = f1.norm_squared() + f2.norm_squared();
        (&m1 - &m2).norm_squared() + traces - 2.0 * cross
    });
    match direct {
        Ok(value) => Ok(FidScore {
            value: value.max(0.0),
            space_tag: reference.space_tag(),
            n_ref: reference.n_samples(),
            n_gen: generated.n_samples(),
            sqrtm_jitter: 0.0,
        }),
        Err(_) => frechet_distance(
            &compute_summary(reference, denominator)?,
            &compute_summary(generated, denominator)?,
        ),
    }
}

fn check_compatible(a: SpaceTag, da: usize, b: SpaceTag, db: usize) -> Result<()> {
    if da != db || a != b {
        return Err(DiversityError::SpaceMismatch(format!(
            "reference is {a} (D = {da}), generated is {b} (D = {db})"
        )));
    }
    Ok(())
}

/// Runs `attempt` without jitter, then once more with [`SQRTM_JITTER`].
fn with_retry(attempt: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    match attempt(0.0) {
        Ok(v) => Ok((v, 0.0)),
        Err(first) => attempt(SQRTM_JITTER)
            .map(|v| (v, SQRTM_JITTER))
            .map_err(|second| {
                DiversityError::NumericalFailure(format!(
                    "matrix square root failed ({first}); retry with jitter {SQRTM_JITTER:e} failed ({second})"
                ))
            }),
    }
}

/// `F` with `FᵀF = Σ + jitter·I`, taken as `Λ^{1/2} Vᵀ`.
fn covariance_factor(covariance: &DMatrix<f64>, jitter: f64) -> Result<DMatrix<f64>> {
    let d = covariance.nrows();
    let shifted = covariance + DMatrix::identity(d, d) * jitter;
    let eig = SymmetricEigen::try_new(shifted, f64::EPSILON, MAX_SOLVER_ITERATIONS)
        .ok_or_else(|| DiversityError::NumericalFailure("eigen-solver did not converge".into()))?;
    let largest = eig.eigenvalues.max().max(0.0);
    let smallest = eig.eigenvalues.min();
    if smallest < -NEGATIVE_TOLERANCE * largest {
        return Err(DiversityError::NumericalFailure(format!(
            "covariance is not positive semidefinite (eigenvalue {smallest:e}, largest {largest:e})"
        )));
    }
    let mut factor = eig.eigenvectors.transpose();
    for (mut row, &lambda) in factor.row_iter_mut().zip(eig.eigenvalues.iter()) {
        row *= lambda.max(0.0).sqrt();
    }
    Ok(factor)
}

/// Sum of singular values.
fn nuclear_norm(m: &DMatrix<f64>) -> Result<f64> {
    if m.is_empty() {
        return Ok(0.0);
    }
    let svd = m
        .clone()
        .try_svd(false, false, f64::EPSILON, MAX_SOLVER_ITERATIONS)
        .ok_or_else(|| DiversityError::NumericalFailure("SVD did not converge".into()))?;
    let total = svd.singular_values.sum();
    if !total.is_finite() {
        return Err(DiversityError::NumericalFailure(
            "non-finite singular values".into(),
        ));
    }
    Ok(total)
}
