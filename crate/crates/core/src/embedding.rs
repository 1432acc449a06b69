//! Embedding sets: one matrix of latent vectors per set of artifacts.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{DiversityError, Result};

/// Latent space an embedding set lives in.
///
/// Scores computed in different spaces are never comparable, so the tag
/// travels with every set, summary and score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceTag {
    /// InceptionV3 pool layer activations, D = 2048.
    Inception2048,
    /// CLIP image/text embeddings, D = 512.
    Clip512,
    /// Any other space of the given dimension.
    Custom(usize),
}

impl SpaceTag {
    /// Fixed dimension of a named space, `None` for custom spaces.
    pub fn fixed_dimension(self) -> Option<usize> {
        match self {
            SpaceTag::Inception2048 => Some(2048),
            SpaceTag::Clip512 => Some(512),
            SpaceTag::Custom(_) => None,
        }
    }

    /// Dimension the tag declares.
    pub fn dimension(self) -> usize {
        match self {
            SpaceTag::Inception2048 => 2048,
            SpaceTag::Clip512 => 512,
            SpaceTag::Custom(d) => d,
        }
    }

    /// Infers the tag from a dimension: 2048 and 512 map to the named spaces.
    pub fn for_dimension(d: usize) -> Self {
        match d {
            2048 => SpaceTag::Inception2048,
            512 => SpaceTag::Clip512,
            d => SpaceTag::Custom(d),
        }
    }

    /// Checks that the tag is consistent with a data dimension.
    pub fn check_dimension(self, d: usize) -> Result<()> {
        match self {
            SpaceTag::Custom(c) if c != d => Err(DiversityError::SpaceMismatch(format!(
                "space custom:{c} declared but data has D = {d}"
            ))),
            tag => match tag.fixed_dimension() {
                Some(expected) if expected != d => Err(DiversityError::SpaceMismatch(format!(
                    "space {tag} requires D = {expected}, data has D = {d}"
                ))),
                _ => Ok(()),
            },
        }
    }
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceTag::Inception2048 => f.write_str("inception2048"),
            SpaceTag::Clip512 => f.write_str("clip512"),
            SpaceTag::Custom(d) => write!(f, "custom:{d}"),
        }
    }
}

impl FromStr for SpaceTag {
    type Err = DiversityError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inception2048" => Ok(SpaceTag::Inception2048),
            "clip512" => Ok(SpaceTag::Clip512),
            other => {
                let d = other
                    .strip_prefix("custom:")
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&d| d >= 1);
                d.map(SpaceTag::Custom).ok_or_else(|| {
                    DiversityError::InvalidParameter(format!(
                        "unknown space '{other}' (expected inception2048, clip512 or custom:D)"
                    ))
                })
            }
        }
    }
}

/// An N x D matrix of latent vectors, one row per artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    data: DMatrix<f64>,
    space_tag: SpaceTag,
    source_ids: Option<Vec<String>>,
    labels: Option<Vec<String>>,
}

impl EmbeddingSet {
    /// Validates shape, finiteness and the space tag.
    pub fn new(data: DMatrix<f64>, space_tag: SpaceTag) -> Result<Self> {
        let (n, d) = data.shape();
        if n == 0 {
            return Err(DiversityError::InsufficientSamples { needed: 1, got: 0 });
        }
        if d == 0 {
            return Err(DiversityError::InvalidParameter(
                "embedding dimension must be at least 1".into(),
            ));
        }
        // column-major storage: report the first offender in row-major order
        let mut first_bad: Option<(usize, usize)> = None;
        for (idx, v) in data.iter().enumerate() {
            if !v.is_finite() {
                let (row, col) = (idx % n, idx / n);
                if first_bad.is_none_or(|b| (row, col) < b) {
                    first_bad = Some((row, col));
                }
            }
        }
        if let Some((row, col)) = first_bad {
            return Err(DiversityError::InvalidData { row, col });
        }
        space_tag.check_dimension(d)?;
        Ok(EmbeddingSet {
            data,
            space_tag,
            source_ids: None,
            labels: None,
        })
    }

    /// Builds a set with the space tag inferred from the dimension.
    pub fn from_matrix(data: DMatrix<f64>) -> Result<Self> {
        let tag = SpaceTag::for_dimension(data.ncols());
        Self::new(data, tag)
    }

    /// Builds a set from row vectors of equal length.
    pub fn from_rows(rows: &[Vec<f64>], space_tag: SpaceTag) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != d) {
            return Err(DiversityError::InvalidParameter(format!(
                "row {bad} has length {}, expected {d}",
                rows[bad].len()
            )));
        }
        let data = DMatrix::from_fn(n, d, |i, j| rows[i][j]);
        Self::new(data, space_tag)
    }

    pub fn with_source_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.n_samples() {
            return Err(DiversityError::InvalidParameter(format!(
                "{} source ids for {} rows",
                ids.len(),
                self.n_samples()
            )));
        }
        self.source_ids = Some(ids);
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_samples() {
            return Err(DiversityError::InvalidParameter(format!(
                "{} labels for {} rows",
                labels.len(),
                self.n_samples()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<f64> {
        self.data
    }

    pub fn space_tag(&self) -> SpaceTag {
        self.space_tag
    }

    pub fn source_ids(&self) -> Option<&[String]> {
        self.source_ids.as_deref()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// N, the number of rows.
    pub fn n_samples(&self) -> usize {
        self.data.nrows()
    }

    /// D, the latent dimension.
    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    /// Re-tags the set, checking the new tag against D.
    pub fn retag(mut self, space_tag: SpaceTag) -> Result<Self> {
        space_tag.check_dimension(self.dim())?;
        self.space_tag = space_tag;
        Ok(self)
    }

    /// Selects the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n_samples()) {
            return Err(DiversityError::InvalidParameter(format!(
                "row index {bad} out of range for {} rows",
                self.n_samples()
            )));
        }
        let pick = |v: &Option<Vec<String>>| {
            v.as_ref()
                .map(|v| rows.iter().map(|&r| v[r].clone()).collect())
        };
        let data = self.data.select_rows(rows.iter());
        let mut out = Self::new(data, self.space_tag)?;
        out.source_ids = pick(&self.source_ids);
        out.labels = pick(&self.labels);
        Ok(out)
    }

    /// Concatenates row blocks that share a dimension and space tag.
    pub fn concat(blocks: &[EmbeddingSet]) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or(DiversityError::InsufficientSamples { needed: 1, got: 0 })?;
        let d = first.dim();
        for b in blocks {
            if b.dim() != d || b.space_tag != first.space_tag {
                return Err(DiversityError::SpaceMismatch(format!(
                    "cannot concatenate {} (D = {}) with {} (D = {d})",
                    b.space_tag,
                    b.dim(),
                    first.space_tag
                )));
            }
        }
        let n: usize = blocks.iter().map(EmbeddingSet::n_samples).sum();
        let mut data = DMatrix::zeros(n, d);
        let mut offset = 0;
        for b in blocks {
            data.rows_mut(offset, b.n_samples()).copy_from(&b.data);
            offset += b.n_samples();
        }
        let gather = |f: fn(&EmbeddingSet) -> Option<&[String]>| -> Option<Vec<String>> {
            blocks
                .iter()
                .map(|b| f(b).map(<[String]>::to_vec))
                .collect::<Option<Vec<_>>>()
                .map(|v| v.concat())
        };
        let mut out = Self::new(data, first.space_tag)?;
        out.source_ids = gather(EmbeddingSet::source_ids);
        out.labels = gather(EmbeddingSet::labels);
        Ok(out)
    }
}
