use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the diversity engine and its file formats.
#[derive(Debug, Error)]
pub enum DiversityError {
    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("non-finite value at row {row}, column {col}")]
    InvalidData { row: usize, col: usize },

    #[error("k = {k} exceeds the effective rank {effective_rank} of the covariance spectrum")]
    RankDeficient { k: usize, effective_rank: usize },

    #[error("eigenvalue #{index} ({value:e}) is at or below the clamp floor {floor:e}")]
    DegenerateSpectrum {
        index: usize,
        value: f64,
        floor: f64,
    },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("zero variance in both groups; the t statistic is undefined")]
    DegenerateVariance,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{}: unsupported format: {reason}", path.display())]
    UnsupportedFormat { path: PathBuf, reason: String },

    #[error("{}: corrupt file: {reason}", path.display())]
    CorruptFile { path: PathBuf, reason: String },

    #[error("{}: expected a 2-dimensional array with nonzero extents, found shape {shape:?}", path.display())]
    BadShape { path: PathBuf, shape: Vec<usize> },

    #[error("{}: missing input", path.display())]
    MissingInput { path: PathBuf },

    #[error("{}: invalid manifest: {reason}", path.display())]
    InvalidManifest { path: PathBuf, reason: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("subset {index}: {source}")]
    InSubset {
        index: usize,
        #[source]
        source: Box<DiversityError>,
    },
    #[error("set '{name}': {source}")]
    InSet {
        name: String,
        #[source]
        source: Box<DiversityError>,
    },
}

/// Coarse grouping of errors, used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad parameters supplied by the caller.
    Usage,
    /// Corrupt, missing or mismatched input data.
    Data,
    /// Rank or convergence problems inside the numerics.
    Numerical,
}

impl DiversityError {
    pub fn class(&self) -> ErrorClass {
        use DiversityError::*;
        match self {
            InvalidParameter(_) => ErrorClass::Usage,
            RankDeficient { .. }
            | DegenerateSpectrum { .. }
            | NumericalFailure(_)
            | DegenerateVariance => ErrorClass::Numerical,
            InsufficientSamples { .. }
            | InvalidData { .. }
            | SpaceMismatch(_)
            | UnsupportedFormat { .. }
            | CorruptFile { .. }
            | BadShape { .. }
            | MissingInput { .. }
            | InvalidManifest { .. }
            | Io { .. } => ErrorClass::Data,
            InSubset { source, .. } | InSet { source, .. } => source.class(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            DiversityError::MissingInput { path }
        } else {
            DiversityError::Io { path, source }
        }
    }
}

pub type Result<T, E = DiversityError> = std::result::Result<T, E>;
