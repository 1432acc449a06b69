//! Diversity and quality metrics over latent embeddings of generated content.
//!
//! Within-set diversity is measured as the truncated differential entropy of
//! a Gaussian fit to the set's embeddings, using only the K largest
//! eigenvalues of the empirical covariance:
//!
//! ```text
//! H_K = (K/2) ln(2πe) + ½ Σ_{k≤K} ln λ_k
//! ```
//!
//! Truncation keeps the score finite when there are fewer samples than
//! latent dimensions and the covariance is singular. On InceptionV3
//! embeddings the score is the Truncated Inception Entropy (TIE), on CLIP
//! embeddings the Truncated CLIP Entropy (TCE). Quality is measured by the
//! Fréchet distance between Gaussian fits (FID).
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`covariance`] | empirical mean and covariance |
//! | [`spectrum`] | dense and Gram-matrix eigenspectra |
//! | [`entropy`] | TIE / TCE and the Gaussian entropy |
//! | [`frechet`] | Fréchet distance |
//! | [`io`] | `.npy` arrays and JSON set manifests |
//! | [`stats`] | resampling and significance tests |
//! | [`synth`] | synthetic sets with known ground truth |
//!
//! ```
//! use latent_diversity::synth::{sample_gaussian, SpectrumSpec};
//! use latent_diversity::entropy::{diversity, EntropyOptions};
//!
//! let spec = SpectrumSpec::new(64, vec![9.0, 4.0, 1.0], 1).unwrap();
//! let sample = sample_gaussian(&spec, 500, 2).unwrap();
//! let score = diversity(&sample.set, EntropyOptions::with_k(3)).unwrap();
//! let truth = spec.population_entropy(3).unwrap();
//! assert!((score.value - truth).abs() / truth < 0.05);
//! ```

pub mod covariance;
pub mod embedding;
pub mod entropy;
pub mod error;
pub mod frechet;
pub mod io;
pub mod json;
pub mod spectrum;
pub mod stats;
pub mod synth;

pub use covariance::{compute_summary, CovarianceSummary, Denominator};
pub use embedding::{EmbeddingSet, SpaceTag};
pub use entropy::{
    diversity, tce, tie, truncated_entropy, DiversityScore, EntropyOptions, ScoreKind, DEFAULT_K,
};
pub use error::{DiversityError, ErrorClass, Result};
pub use frechet::{frechet_distance, frechet_distance_sets, FidScore};
pub use spectrum::{top_k_eigenvalues, EigenMethod, EigenSpectrum};
