use std::fmt;
use std::str::FromStr;

use std::ops::AddAssign;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingSet, SpaceTag};
use crate::error::{DiversityError, Result};

/// Dimension of the fixed "style" subspace: the first `STYLE_AXES`
/// coordinate axes.
pub const STYLE_AXES: usize = 8;

/// The five set-construction regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// One prompt, generator noise reduced to 20 %.
    ControlLow,
    /// One prompt, full generator noise.
    ControlHigh,
    /// Many prompts placing the object somewhere plausible.
    Usual,
    /// Many prompts placing the object somewhere absurd.
    Unusual,
    /// One prompt rendered in many visual styles.
    Style,
}

impl Regime {
    pub const ALL: [Regime; 5] = [
        Regime::ControlLow,
        Regime::ControlHigh,
        Regime::Usual,
        Regime::Unusual,
        Regime::Style,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Regime::ControlLow => "control_low",
            Regime::ControlHigh => "control_high",
            Regime::Usual => "usual",
            Regime::Unusual => "unusual",
            Regime::Style => "style",
        }
    }

    /// Frozen default constants; see `examples/calibrate_presets.rs`.
    pub fn preset(self) -> RegimePreset {
        let (n_clusters, cluster_spread, center_spread, style_axis_gain) = match self {
            Regime::ControlLow => (1, 0.2, 0.5, 0.0),
            Regime::ControlHigh => (1, 1.0, 0.5, 0.0),
            Regime::Usual => (9, 0.5, 1.0, 0.0),
            Regime::Unusual => (45, 0.5, 2.0, 0.0),
            Regime::Style => (1, 1.0, 0.5, 27.2),
        };
        RegimePreset {
            name: self,
            n_clusters,
            cluster_spread,
            center_spread,
            style_axis_gain,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = DiversityError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        Regime::ALL
            .into_iter()
            .find(|r| r.name() == norm)
            .ok_or_else(|| {
                DiversityError::InvalidParameter(format!(
                    "unknown preset '{s}' (expected one of control_low, control_high, usual, unusual, style)"
                ))
            })
    }
}

/// Cluster layout of one regime.
///
/// Cluster centres are `N(0, center_spread² I)`; rows are assigned to
/// clusters round-robin and perturbed by `N(0, cluster_spread² I)`. A
/// nonzero `style_axis_gain` adds random offsets on the style axes whose
/// sample covariance is `gain² I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimePreset {
    pub name: Regime,
    pub n_clusters: usize,
    pub cluster_spread: f64,
    pub center_spread: f64,
    pub style_axis_gain: f64,
}

impl RegimePreset {
    fn validate(&self, n: usize, d: usize) -> Result<()> {
        let bad = |msg: String| Err(DiversityError::InvalidParameter(msg));
        if self.n_clusters == 0 || self.n_clusters > n {
            return bad(format!(
                "need 1 <= n_clusters <= n, got n_clusters = {} and n = {n}",
                self.n_clusters
            ));
        }
        for (name, v) in [
            ("cluster_spread", self.cluster_spread),
            ("center_spread", self.center_spread),
            ("style_axis_gain", self.style_axis_gain),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be finite and nonnegative, got {v}"));
            }
        }
        if d == 0 || (self.style_axis_gain > 0.0 && d <= STYLE_AXES) {
            return bad(format!("dimension {d} too small for this preset"));
        }
        Ok(())
    }
}

/// Draws an n x d set for the preset, labelled with the regime name.
pub fn generate_regime(
    preset: &RegimePreset,
    n: usize,
    d: usize,
    seed: u64,
) -> Result<EmbeddingSet> {
    preset.validate(n, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = move || -> f64 { StandardNormal.sample(&mut rng) };

    let centers = DMatrix::from_fn(preset.n_clusters, d, |_, _| preset.center_spread * normal());
    let mut data = DMatrix::zeros(n, d);
    for i in 0..n {
        let c = i % preset.n_clusters;
        for j in 0..d {
            data[(i, j)] = centers[(c, j)] + preset.cluster_spread * normal();
        }
    }
    if preset.style_axis_gain > 0.0 && n > STYLE_AXES {
        let style = balanced_style_offsets(n, preset.style_axis_gain, &mut normal);
        data.columns_mut(0, STYLE_AXES).add_assign(&style);
    } else if preset.style_axis_gain > 0.0 {
        for i in 0..n {
            for j in 0..STYLE_AXES {
                data[(i, j)] += preset.style_axis_gain * normal();
            }
        }
    }
    let labels = vec![preset.name.name().to_string(); n];
    EmbeddingSet::new(data, SpaceTag::for_dimension(d))?.with_labels(labels)
}

/// n x STYLE_AXES offsets with zero column means and sample covariance
/// exactly `gain² I`: random directions, but the set-level style variance is
/// fixed instead of fluctuating with the draw.
fn balanced_style_offsets(n: usize, gain: f64, normal: &mut impl FnMut() -> f64) -> DMatrix<f64> {
    let raw = DMatrix::from_fn(n, STYLE_AXES, |_, _| normal());
    let (_, centered) = crate::covariance::center(&raw);
    centered.qr().q() * (gain * ((n - 1) as f64).sqrt())
}

/// Projection onto the complement of the style subspace, i.e. the set with
/// the style axes removed. Models a metric that is blind to purely visual
/// variation.
pub fn semantic_view(set: &EmbeddingSet) -> Result<EmbeddingSet> {
    let d = set.dim();
    if d <= STYLE_AXES {
        return Err(DiversityError::InvalidParameter(format!(
            "dimension {d} leaves nothing after removing {STYLE_AXES} style axes"
        )));
    }
    let kept = set.data().columns(STYLE_AXES, d - STYLE_AXES).into_owned();
    let mut out = EmbeddingSet::new(kept, SpaceTag::Custom(d - STYLE_AXES))?;
    if let Some(labels) = set.labels() {
        out = out.with_labels(labels.to_vec())?;
    }
    Ok(out)
}
