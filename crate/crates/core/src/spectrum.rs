//! Covariance eigenspectra, from the dense D x D covariance or from the
//! N x N Gram matrix of the centred samples.
//!
//! For centred data `Xc` (N x D), `XcᵀXc` and `XcXcᵀ` share their nonzero
//! eigenvalues. When N < D the Gram route solves an N x N problem and never
//! materialises the D x D covariance.

use nalgebra::linalg::SymmetricTridiagonal;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::covariance::{center, compute_summary, CovarianceSummary, Denominator};
use crate::embedding::{EmbeddingSet, SpaceTag};
use crate::error::{DiversityError, Result};

/// Absolute part of the clamp floor.
pub const EPS_ABS: f64 = 1e-12;
/// Relative part of the clamp floor, scaled by the largest eigenvalue.
pub const EPS_REL: f64 = 1e-10;

const MAX_QL_SWEEPS: usize = 64;

/// Requested eigen-solver route.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum EigenMethod {
    /// Gram when N < D, dense otherwise.
    #[default]
    Auto,
    Dense,
    Gram,
}

/// Route that actually produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMethod {
    Dense,
    Gram,
}

/// Descending, nonnegative covariance eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Number of eigenvalues strictly above `clamp_floor`.
    pub effective_rank: usize,
    pub clamp_floor: f64,
    pub method: SpectrumMethod,
    pub n_samples: usize,
    pub space_tag: SpaceTag,
}

impl EigenSpectrum {
    /// Wraps raw eigenvalues: sorts them, clamps floating-point dust below
    /// zero and counts the effective rank.
    ///
    /// Fails if some eigenvalue is negative beyond `-EPS_REL * λ₁`, i.e. the
    /// source matrix was not positive semidefinite.
    pub fn from_eigenvalues(
        mut eigenvalues: Vec<f64>,
        method: SpectrumMethod,
        n_samples: usize,
        space_tag: SpaceTag,
    ) -> Result<Self> {
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(DiversityError::NumericalFailure(
                "non-finite eigenvalue".into(),
            ));
        }
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let largest = eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
        if let Some(&smallest) = eigenvalues.last() {
            if smallest < -EPS_REL * largest {
                return Err(DiversityError::NumericalFailure(format!(
                    "matrix is not positive semidefinite (eigenvalue {smallest:e}, largest {largest:e})"
                )));
            }
        }
        for v in &mut eigenvalues {
            *v = v.max(0.0);
        }
        let clamp_floor = EPS_ABS.max(EPS_REL * largest);
        let effective_rank = eigenvalues.iter().take_while(|&&v| v > clamp_floor).count();
        Ok(EigenSpectrum {
            eigenvalues,
            effective_rank,
            clamp_floor,
            method,
            n_samples,
            space_tag,
        })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// The `k` largest eigenvalues, after checking `k` against the rank.
    pub fn top(&self, k: usize) -> Result<&[f64]> {
        self.check_rank(k)?;
        Ok(&self.eigenvalues[..k])
    }

    pub fn check_rank(&self, k: usize) -> Result<()> {
        if k == 0 {
            return Err(DiversityError::InvalidParameter(
                "k must be at least 1".into(),
            ));
        }
        if k > self.effective_rank {
            return Err(DiversityError::RankDeficient {
                k,
                effective_rank: self.effective_rank,
            });
        }
        Ok(())
    }
}

/// Where a spectrum is computed from.
#[derive(Debug, Clone, Copy)]
pub enum SpectrumSource<'a> {
    /// A precomputed covariance; only the dense route is available.
    Summary(&'a CovarianceSummary),
    /// Raw samples plus the covariance normalisation to apply.
    Set(&'a EmbeddingSet, Denominator),
}

impl<'a> From<&'a CovarianceSummary> for SpectrumSource<'a> {
    fn from(s: &'a CovarianceSummary) -> Self {
        SpectrumSource::Summary(s)
    }
}

impl<'a> From<&'a EmbeddingSet> for SpectrumSource<'a> {
    fn from(s: &'a EmbeddingSet) -> Self {
        SpectrumSource::Set(s, Denominator::default())
    }
}

/// Computes the full covariance spectrum without any rank check.
pub fn compute_spectrum<'a>(
    source: impl Into<SpectrumSource<'a>>,
    method: EigenMethod,
) -> Result<EigenSpectrum> {
    match source.into() {
        SpectrumSource::Summary(summary) => match method {
            EigenMethod::Gram => Err(DiversityError::InvalidParameter(
                "the gram route needs the samples, not a covariance summary".into(),
            )),
            EigenMethod::Auto | EigenMethod::Dense => dense_spectrum(summary),
        },
        SpectrumSource::Set(set, denominator) => {
            let use_gram = match method {
                EigenMethod::Auto => set.n_samples() < set.dim(),
                EigenMethod::Dense => false,
                EigenMethod::Gram => true,
            };
            if use_gram {
                gram_spectrum(set, denominator)
            } else {
                dense_spectrum(&compute_summary(set, denominator)?)
            }
        }
    }
}

/// Covariance spectrum with the guarantee that the `k` leading eigenvalues
/// lie above the clamp floor.
///
/// `k` is never silently reduced: asking for more eigenvalues than the
/// effective rank is a [`DiversityError::RankDeficient`] error.
pub fn top_k_eigenvalues<'a>(
    source: impl Into<SpectrumSource<'a>>,
    k: usize,
    method: EigenMethod,
) -> Result<EigenSpectrum> {
    let spectrum = compute_spectrum(source, method)?;
    spectrum.check_rank(k)?;
    Ok(spectrum)
}

fn dense_spectrum(summary: &CovarianceSummary) -> Result<EigenSpectrum> {
    let values = symmetric_eigenvalues(summary.covariance.clone())?;
    EigenSpectrum::from_eigenvalues(
        values,
        SpectrumMethod::Dense,
        summary.n_samples,
        summary.space_tag,
    )
}

fn gram_spectrum(set: &EmbeddingSet, denominator: Denominator) -> Result<EigenSpectrum> {
    let n = set.n_samples();
    if n < 2 {
        return Err(DiversityError::InsufficientSamples { needed: 2, got: n });
    }
    let (_, centered) = center(set.data());
    let gram = &centered * centered.transpose() / denominator.value(n);
    let gram = crate::covariance::symmetrize(gram);
    let mut values = symmetric_eigenvalues(gram)?;
    // centring removes one degree of freedom: keep the min(N-1, D) largest
    values.sort_by(|a, b| b.total_cmp(a));
    values.truncate((n - 1).min(set.dim()));
    EigenSpectrum::from_eigenvalues(values, SpectrumMethod::Gram, n, set.space_tag())
}

/// Eigenvalues (unsorted) of a symmetric matrix: Householder reduction to
/// tridiagonal form followed by implicit QL iterations.
pub fn symmetric_eigenvalues(m: DMatrix<f64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(DiversityError::InvalidParameter(format!(
            "matrix is {}x{}, expected square",
            n,
            m.ncols()
        )));
    }
    match n {
        0 => Ok(Vec::new()),
        1 => Ok(vec![m[(0, 0)]]),
        _ => {
            let (diag, off) = SymmetricTridiagonal::new(m).unpack_tridiagonal();
            let mut d: Vec<f64> = diag.iter().copied().collect();
            tridiagonal_ql(&mut d, off.as_slice())?;
            Ok(d)
        }
    }
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
/// `d` holds the diagonal and is overwritten by the eigenvalues; `off` holds
/// the n-1 sub-diagonal entries.
fn tridiagonal_ql(d: &mut [f64], off: &[f64]) -> Result<()> {
    let n = d.len();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&off[..n - 1]);

    // off-diagonals are negligible relative to the norm of the whole matrix
    let scale = (0..n)
        .map(|i| d[i].abs() + e[i].abs() + if i > 0 { e[i - 1].abs() } else { 0.0 })
        .fold(0.0f64, f64::max);
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                if e[m].abs() <= f64::EPSILON * scale {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(DiversityError::NumericalFailure(format!(
                    "QL iteration did not converge for eigenvalue {l} after {MAX_QL_SWEEPS} sweeps"
                )));
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
