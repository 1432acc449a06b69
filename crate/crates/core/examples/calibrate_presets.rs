//! One-off calibration of the regime presets.
//!
//! Runs the 10 x 30-of-45 resampling protocol (K = 20, D = 512) over many
//! seeds and prints per-regime score statistics for the full space and for
//! the semantic view, plus how often the expected orderings hold. With
//! `--fit-style` it also bisects the style gain that makes the full-space
//! style mean match the unusual mean.
//!
//!     cargo run --release --example calibrate_presets -- [seeds] [--fit-style]

use latent_diversity::stats::{mann_whitney_u, resample_scores, Metric, ResamplingPlan};
use latent_diversity::synth::{generate_regime, semantic_view, Regime, RegimePreset};
use latent_diversity::EmbeddingSet;

const N: usize = 45;
const D: usize = 512;
const K: usize = 20;

fn scores(set: &EmbeddingSet, seed: u64) -> Vec<f64> {
    let plan = ResamplingPlan::new(10, 30, seed);
    resample_scores(set, &plan, K, Metric::Generic)
        .unwrap()
        .into_iter()
        .map(|s| s.value)
        .collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn full_and_semantic(preset: &RegimePreset, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let set = generate_regime(preset, N, D, seed).unwrap();
    (
        scores(&set, seed),
        scores(&semantic_view(&set).unwrap(), seed),
    )
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let seeds: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(100);

    if args.iter().any(|a| a == "--fit-style") {
        let target: f64 = (0..seeds)
            .map(|s| mean(&full_and_semantic(&Regime::Unusual.preset(), s).0))
            .sum::<f64>()
            / seeds as f64;
        let (mut lo, mut hi) = (1.0, 200.0);
        for _ in 0..30 {
            let mid = 0.5 * (lo + hi);
            let preset = RegimePreset {
                style_axis_gain: mid,
                ..Regime::Style.preset()
            };
            let m: f64 = (0..seeds)
                .map(|s| mean(&full_and_semantic(&preset, s).0))
                .sum::<f64>()
                / seeds as f64;
            if m < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        println!(
            "unusual full-space mean {target:.4}; matching style gain {:.4}",
            0.5 * (lo + hi)
        );
        return;
    }

    let mut table: Vec<(Regime, Vec<f64>, Vec<f64>)> = Regime::ALL
        .iter()
        .map(|&r| (r, Vec::new(), Vec::new()))
        .collect();
    let (mut ordered, mut significant, mut style_full_ns, mut style_sem_sig) = (0, 0, 0, 0);
    for seed in 0..seeds {
        let runs: Vec<(Vec<f64>, Vec<f64>)> = Regime::ALL
            .iter()
            .map(|r| full_and_semantic(&r.preset(), seed))
            .collect();
        for (row, (full, sem)) in table.iter_mut().zip(&runs) {
            row.1.push(mean(full));
            row.2.push(mean(sem));
        }
        let m: Vec<f64> = runs.iter().map(|r| mean(&r.0)).collect();
        let (low, high, usual, unusual, style) = (0, 1, 2, 3, 4);
        if m[low] < m[high] && m[low] < m[usual] && m[usual] < m[unusual] && m[high] < m[unusual] {
            ordered += 1;
        }
        let p = |a: usize, b: usize| mann_whitney_u(&runs[a].0, &runs[b].0).unwrap().p_value;
        if [(low, high), (low, usual), (usual, unusual)]
            .iter()
            .all(|&(a, b)| p(a, b) < 0.01)
        {
            significant += 1;
        }
        if p(style, unusual) > 0.05 {
            style_full_ns += 1;
        }
        let ps = mann_whitney_u(&runs[style].1, &runs[unusual].1)
            .unwrap()
            .p_value;
        if ps < 0.01 && mean(&runs[style].1) < mean(&runs[unusual].1) {
            style_sem_sig += 1;
        }
    }

    println!(
        "{:<13} {:>12} {:>10} {:>12} {:>10}",
        "regime", "full mean", "sd", "semantic", "sd"
    );
    for (r, full, sem) in &table {
        let sd = |v: &[f64]| {
            let m = mean(v);
            (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)).sqrt()
        };
        println!(
            "{:<13} {:>12.4} {:>10.4} {:>12.4} {:>10.4}",
            r.name(),
            mean(full),
            sd(full),
            mean(sem),
            sd(sem)
        );
    }
    println!("ordering holds: {ordered}/{seeds}");
    println!("ordering pairs all p < 0.01: {significant}/{seeds}");
    println!("style vs unusual, full space p > 0.05: {style_full_ns}/{seeds}");
    println!("style < unusual, semantic view p < 0.01: {style_sem_sig}/{seeds}");
}
