//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function has a plain-Rust twin (`*_impl`) so the numbers can
//! be tested natively.

use latent_diversity::entropy::{gaussian_entropy, ln_two_pi_e};
use latent_diversity::json::to_stable_string;
use latent_diversity::spectrum::{compute_spectrum, SpectrumSource};
use latent_diversity::stats::{compare_many, Metric, ResamplingPlan, SignificanceTest};
use latent_diversity::synth::{
    generate_regime, sample_gaussian, semantic_view, Regime, SpectrumSpec,
};
use latent_diversity::{
    diversity, Denominator, DiversityError, EigenMethod, EmbeddingSet, EntropyOptions, Result,
};
use wasm_bindgen::prelude::*;

fn regime_set(regime: &str, n: usize, d: usize, seed: u64) -> Result<EmbeddingSet> {
    let regime: Regime = regime.parse()?;
    generate_regime(&regime.preset(), n, d, seed)
}

/// Leading eigenvalues of a regime set, followed by the truncated entropy at
/// every K from 1 to `k_max`. Both halves have length `k_max`.
pub fn spectrum_curve_impl(
    regime: &str,
    n: usize,
    d: usize,
    seed: u64,
    k_max: usize,
) -> Result<Vec<f64>> {
    let set = regime_set(regime, n, d, seed)?;
    let spectrum = compute_spectrum(
        SpectrumSource::Set(&set, Denominator::NMinus1),
        EigenMethod::Auto,
    )?;
    spectrum.check_rank(k_max)?;
    let top = spectrum.top(k_max)?;
    let mut out = top.to_vec();
    let mut log_sum = 0.0;
    for (k, &lambda) in top.iter().enumerate() {
        log_sum += lambda.ln();
        out.push(0.5 * (k + 1) as f64 * ln_two_pi_e() + 0.5 * log_sum);
    }
    Ok(out)
}

/// Resampled comparison of all five regimes as stable JSON. With `restricted`
/// the style axes are dropped before scoring.
pub fn compare_regimes_impl(
    seed: u64,
    plan_seed: u64,
    k: usize,
    restricted: bool,
) -> Result<String> {
    let sets = Regime::ALL
        .iter()
        .map(|&r| {
            let set = generate_regime(&r.preset(), 45, 512, seed)?;
            let set = if restricted {
                semantic_view(&set)?
            } else {
                set
            };
            Ok((r.name().to_string(), set))
        })
        .collect::<Result<Vec<_>>>()?;
    let plan = ResamplingPlan::new(10, 30, plan_seed);
    let report = compare_many(
        &sets,
        &plan,
        k,
        Metric::Generic,
        SignificanceTest::MannWhitneyU,
    )?;
    to_stable_string(&report).map_err(|e| DiversityError::NumericalFailure(e.to_string()))
}

/// Sample truncated entropy (K = 3) for `seeds` draws of `n` points from a
/// Gaussian with spectrum (9, 4, 1) in `d` dimensions; the population value
/// is appended last.
pub fn gaussian_convergence_impl(n: usize, d: usize, seeds: u64) -> Result<Vec<f64>> {
    let spec = SpectrumSpec::new(d, vec![9.0, 4.0, 1.0], 0)?;
    let mut out = (0..seeds)
        .map(|seed| {
            let sample = sample_gaussian(&spec, n, seed)?;
            Ok(diversity(&sample.set, EntropyOptions::with_k(3))?.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    out.push(gaussian_entropy(&spec.eigenvalues));
    Ok(out)
}

fn js(e: DiversityError) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = spectrumCurve)]
pub fn spectrum_curve(
    regime: &str,
    n: usize,
    d: usize,
    seed: u32,
    k_max: usize,
) -> Result<Vec<f64>, JsError> {
    spectrum_curve_impl(regime, n, d, seed.into(), k_max).map_err(js)
}

#[wasm_bindgen(js_name = compareRegimes)]
pub fn compare_regimes(
    seed: u32,
    plan_seed: u32,
    k: usize,
    restricted: bool,
) -> Result<String, JsError> {
    compare_regimes_impl(seed.into(), plan_seed.into(), k, restricted).map_err(js)
}

#[wasm_bindgen(js_name = gaussianConvergence)]
pub fn gaussian_convergence(n: usize, d: usize, seeds: u32) -> Result<Vec<f64>, JsError> {
    gaussian_convergence_impl(n, d, seeds.into()).map_err(js)
}
