//! Gaussian differential entropy and its truncated variants (TIE / TCE).

use std::f64::consts::{E, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::covariance::Denominator;
use crate::embedding::{EmbeddingSet, SpaceTag};
use crate::error::{DiversityError, Result};
use crate::spectrum::{top_k_eigenvalues, EigenMethod, EigenSpectrum, SpectrumSource};

/// Number of eigenvalues used when the caller does not choose one.
pub const DEFAULT_K: usize = 20;

/// `ln(2πe)`, the per-dimension constant of the Gaussian entropy.
pub fn ln_two_pi_e() -> f64 {
    (2.0 * PI * E).ln()
}

/// Which truncated entropy a score is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScoreKind {
    /// Truncated Inception Entropy (InceptionV3 latents).
    #[serde(rename = "TIE")]
    Tie,
    /// Truncated CLIP Entropy (CLIP latents).
    #[serde(rename = "TCE")]
    Tce,
    #[serde(rename = "generic_truncated_entropy")]
    Generic,
}

impl ScoreKind {
    pub fn for_space(tag: SpaceTag) -> Self {
        match tag {
            SpaceTag::Inception2048 => ScoreKind::Tie,
            SpaceTag::Clip512 => ScoreKind::Tce,
            SpaceTag::Custom(_) => ScoreKind::Generic,
        }
    }
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreKind::Tie => "TIE",
            ScoreKind::Tce => "TCE",
            ScoreKind::Generic => "generic_truncated_entropy",
        })
    }
}

/// A truncated-entropy diversity score, in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversityScore {
    pub value: f64,
    #[serde(rename = "k")]
    pub k_used: usize,
    #[serde(rename = "space")]
    pub space_tag: SpaceTag,
    #[serde(rename = "n")]
    pub n_samples: usize,
    pub kind: ScoreKind,
}

impl DiversityScore {
    /// Scores are comparable only within one kind, space and K.
    pub fn ensure_comparable(&self, other: &DiversityScore) -> Result<()> {
        if self.kind != other.kind
            || self.space_tag != other.space_tag
            || self.k_used != other.k_used
        {
            return Err(DiversityError::SpaceMismatch(format!(
                "cannot compare {} (space {}, k = {}) with {} (space {}, k = {})",
                self.kind, self.space_tag, self.k_used, other.kind, other.space_tag, other.k_used
            )));
        }
        Ok(())
    }

    /// `self - other`, refusing incomparable scores.
    pub fn difference(&self, other: &DiversityScore) -> Result<f64> {
        self.ensure_comparable(other)?;
        Ok(self.value - other.value)
    }
}

/// Checks that a batch of scores shares kind, space and K.
pub fn ensure_all_comparable<'a>(
    scores: impl IntoIterator<Item = &'a DiversityScore>,
) -> Result<()> {
    let mut iter = scores.into_iter();
    if let Some(first) = iter.next() {
        for s in iter {
            first.ensure_comparable(s)?;
        }
    }
    Ok(())
}

/// Sorts comparable scores in increasing order of value.
pub fn rank_scores(scores: &mut [DiversityScore]) -> Result<()> {
    ensure_all_comparable(scores.iter())?;
    scores.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(())
}

/// Differential entropy `½ ln det(2πe Σ)` of a Gaussian with the given
/// covariance eigenvalues. Returns `-inf` for a singular covariance.
pub fn gaussian_entropy(eigenvalues: &[f64]) -> f64 {
    let d = eigenvalues.len() as f64;
    0.5 * d * ln_two_pi_e() + 0.5 * eigenvalues.iter().map(|v| v.ln()).sum::<f64>()
}

/// `(k/2) ln(2πe) + ½ Σ_{j≤k} ln λ_j` over the k largest eigenvalues.
pub fn truncated_entropy(spectrum: &EigenSpectrum, k: usize) -> Result<DiversityScore> {
    let top = spectrum.top(k)?;
    if let Some((index, &value)) = top
        .iter()
        .enumerate()
        .find(|(_, &v)| v <= spectrum.clamp_floor)
    {
        return Err(DiversityError::DegenerateSpectrum {
            index,
            value,
            floor: spectrum.clamp_floor,
        });
    }
    Ok(DiversityScore {
        value: gaussian_entropy(top),
        k_used: k,
        space_tag: spectrum.space_tag,
        n_samples: spectrum.n_samples,
        kind: ScoreKind::for_space(spectrum.space_tag),
    })
}

/// Knobs for the set-to-score pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntropyOptions {
    pub k: usize,
    pub denominator: Denominator,
    pub method: EigenMethod,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions {
            k: DEFAULT_K,
            denominator: Denominator::NMinus1,
            method: EigenMethod::Auto,
        }
    }
}

impl EntropyOptions {
    pub fn with_k(k: usize) -> Self {
        EntropyOptions {
            k,
            ..Self::default()
        }
    }
}

/// Truncated entropy of a set in whatever space it is tagged with.
pub fn diversity(set: &EmbeddingSet, options: EntropyOptions) -> Result<DiversityScore> {
    let spectrum = top_k_eigenvalues(
        SpectrumSource::Set(set, options.denominator),
        options.k,
        options.method,
    )?;
    truncated_entropy(&spectrum, options.k)
}

fn require_space(set: &EmbeddingSet, expected: SpaceTag, metric: &str) -> Result<()> {
    if set.space_tag() != expected {
        return Err(DiversityError::SpaceMismatch(format!(
            "{metric} needs {expected} embeddings, got {}",
            set.space_tag()
        )));
    }
    Ok(())
}

/// Truncated Inception Entropy of an `inception2048` set.
pub fn tie(set: &EmbeddingSet, k: usize) -> Result<DiversityScore> {
    require_space(set, SpaceTag::Inception2048, "TIE")?;
    diversity(set, EntropyOptions::with_k(k))
}

/// Truncated CLIP Entropy of a `clip512` set.
pub fn tce(set: &EmbeddingSet, k: usize) -> Result<DiversityScore> {
    require_space(set, SpaceTag::Clip512, "TCE")?;
    diversity(set, EntropyOptions::with_k(k))
}
