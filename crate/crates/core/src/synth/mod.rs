//! Synthetic latent sets with known ground truth: Gaussians with a prescribed
//! covariance spectrum, and clustered sets that mimic five prompt regimes.

mod gaussian;
mod regime;

pub use gaussian::{sample_gaussian, GaussianSample, SpectrumSpec};
pub use regime::{generate_regime, semantic_view, Regime, RegimePreset, STYLE_AXES};
