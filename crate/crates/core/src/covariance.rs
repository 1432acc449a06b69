//! Empirical mean and covariance of an embedding set.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingSet, SpaceTag};
use crate::error::{DiversityError, Result};

/// Normalisation of the scatter matrix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Denominator {
    /// Unbiased estimator, 1/(N-1).
    #[default]
    NMinus1,
    /// Maximum-likelihood estimator, 1/N.
    N,
}

impl Denominator {
    pub fn value(self, n: usize) -> f64 {
        match self {
            Denominator::NMinus1 => (n - 1) as f64,
            Denominator::N => n as f64,
        }
    }
}

impl fmt::Display for Denominator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Denominator::NMinus1 => "n-1",
            Denominator::N => "n",
        })
    }
}

impl FromStr for Denominator {
    type Err = DiversityError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n-1" | "n_minus_1" => Ok(Denominator::NMinus1),
            "n" => Ok(Denominator::N),
            other => Err(DiversityError::InvalidParameter(format!(
                "unknown denominator '{other}' (expected n-1 or n)"
            ))),
        }
    }
}

/// Empirical mean and covariance of an [`EmbeddingSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSummary {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    pub n_samples: usize,
    pub denominator: Denominator,
    pub space_tag: SpaceTag,
}

impl CovarianceSummary {
    /// Builds a summary from known moments, e.g. a population covariance.
    pub fn from_moments(
        mean: DVector<f64>,
        covariance: DMatrix<f64>,
        n_samples: usize,
        space_tag: SpaceTag,
    ) -> Result<Self> {
        let d = mean.len();
        if covariance.shape() != (d, d) {
            return Err(DiversityError::InvalidParameter(format!(
                "covariance shape {:?} does not match mean length {d}",
                covariance.shape()
            )));
        }
        if mean.iter().chain(covariance.iter()).any(|v| !v.is_finite()) {
            return Err(DiversityError::InvalidParameter(
                "moments contain non-finite values".into(),
            ));
        }
        space_tag.check_dimension(d)?;
        let covariance = symmetrize(covariance);
        Ok(CovarianceSummary {
            mean,
            covariance,
            n_samples,
            denominator: Denominator::NMinus1,
            space_tag,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Column means and the row-centred data matrix.
pub(crate) fn center(data: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = data.nrows() as f64;
    let mean = data.row_sum().transpose() / n;
    let mut centered = data.clone();
    for (mut col, m) in centered.column_iter_mut().zip(mean.iter()) {
        col.add_scalar_mut(-m);
    }
    (mean, centered)
}

pub(crate) fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

/// Mean and covariance `(1/den) Xcᵀ Xc` of the centred rows.
pub fn compute_summary(set: &EmbeddingSet, denominator: Denominator) -> Result<CovarianceSummary> {
    let n = set.n_samples();
    if n < 2 {
        return Err(DiversityError::InsufficientSamples { needed: 2, got: n });
    }
    let (mean, centered) = center(set.data());
    let scatter = centered.transpose() * &centered;
    let covariance = symmetrize(scatter / denominator.value(n));
    Ok(CovarianceSummary {
        mean,
        covariance,
        n_samples: n,
        denominator,
        space_tag: set.space_tag(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::SpaceTag;

    fn set(rows: &[Vec<f64>]) -> EmbeddingSet {
        EmbeddingSet::from_rows(rows, SpaceTag::Custom(rows[0].len())).unwrap()
    }

    #[test]
    fn two_point_covariance() {
        let s = compute_summary(
            &set(&[vec![0.0, 0.0], vec![2.0, 0.0]]),
            Denominator::NMinus1,
        )
        .unwrap();
        assert_eq!(s.mean.as_slice(), &[1.0, 0.0]);
        assert_eq!(
            s.covariance,
            DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0])
        );

        let s = compute_summary(&set(&[vec![0.0, 0.0], vec![2.0, 0.0]]), Denominator::N).unwrap();
        assert_eq!(s.covariance[(0, 0)], 1.0);
    }

    #[test]
    fn identical_rows_have_zero_covariance() {
        let rows = vec![vec![3.0, -1.0, 7.5]; 5];
        let s = compute_summary(&set(&rows), Denominator::NMinus1).unwrap();
        assert!(s.covariance.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_row_is_insufficient() {
        let err = compute_summary(&set(&[vec![1.0, 2.0]]), Denominator::NMinus1).unwrap_err();
        assert!(matches!(
            err,
            DiversityError::InsufficientSamples { needed: 2, got: 1 }
        ));
    }

    #[test]
    fn covariance_is_exactly_symmetric() {
        let rows: Vec<Vec<f64>> = (0..7)
            .map(|i| {
                (0..4)
                    .map(|j| ((i * 7 + j * 3) % 11) as f64 * 0.37)
                    .collect()
            })
            .collect();
        let s = compute_summary(&set(&rows), Denominator::NMinus1).unwrap();
        assert_eq!(s.covariance, s.covariance.transpose());
    }

    #[test]
    fn denominator_parsing() {
        assert_eq!("n-1".parse::<Denominator>().unwrap(), Denominator::NMinus1);
        assert_eq!("n".parse::<Denominator>().unwrap(), Denominator::N);
        assert!("n+1".parse::<Denominator>().is_err());
    }
}
