//! Subcommand bodies. Each returns the text destined for standard output.

use std::fs;

use latent_diversity::io::{write_array, write_manifest, Dtype, SetManifest};
use latent_diversity::json::to_stable_string;
use latent_diversity::stats::{compare_many_with, ComparisonReport, Metric, ResamplingPlan};
use latent_diversity::synth::generate_regime;
use latent_diversity::{
    diversity, frechet_distance_sets, DiversityError, EigenMethod, EntropyOptions,
};
use serde::Serialize;

use crate::args::{CompareArgs, DtypeArg, EntropyArgs, FidArgs, Format, SynthArgs};
use crate::input::{load, Input};
use crate::CliError;

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    let mut s = to_stable_string(value)
        .map_err(|e| CliError::Usage(format!("serialisation failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn entropy(args: &EntropyArgs) -> Result<String, CliError> {
    let options = EntropyOptions {
        k: args.k,
        denominator: args.common.denominator,
        method: EigenMethod::Auto,
    };
    let mut scores = Vec::with_capacity(args.paths.len());
    let mut lines = String::new();
    for path in &args.paths {
        let Input { set, .. } = load(path, args.space)?;
        let score = diversity(&set, options).map_err(|e| CliError::at(path, e))?;
        lines.push_str(&format!(
            "{}: {} k={} n={} space={} value={:.6} nats\n",
            path.display(),
            score.kind,
            score.k_used,
            score.n_samples,
            score.space_tag,
            score.value
        ));
        scores.push(score);
    }
    match args.common.format {
        Format::Human => Ok(lines),
        Format::Json if scores.len() == 1 => json(&scores[0]),
        Format::Json => json(&scores),
    }
}

pub fn fid(args: &FidArgs) -> Result<String, CliError> {
    let reference = load(&args.reference, args.space)?;
    let generated = load(&args.generated, args.space)?;
    let score = frechet_distance_sets(&reference.set, &generated.set, args.common.denominator)
        .map_err(|e| CliError::at(&args.generated, e))?;
    match args.common.format {
        Format::Json => json(&score),
        Format::Human => Ok(format!(
            "FID {:.6} ({} vs {}, space={}, n_ref={}, n_gen={}{})\n",
            score.value,
            args.reference.display(),
            args.generated.display(),
            score.space_tag,
            score.n_ref,
            score.n_gen,
            if score.sqrtm_jitter > 0.0 {
                format!(", jitter={:e}", score.sqrtm_jitter)
            } else {
                String::new()
            }
        )),
    }
}

pub fn compare(args: &CompareArgs) -> Result<String, CliError> {
    let inputs = args
        .paths
        .iter()
        .map(|p| load(p, args.space))
        .collect::<Result<Vec<_>, _>>()?;
    let mut names: Vec<String> = inputs.iter().map(|i| i.name.clone()).collect();
    let mut unique = names.clone();
    unique.sort();
    unique.dedup();
    if unique.len() < names.len() {
        names = args.paths.iter().map(|p| p.display().to_string()).collect();
    }
    let sets: Vec<_> = names
        .into_iter()
        .zip(inputs)
        .map(|(name, i)| (name, i.set))
        .collect();
    let plan = ResamplingPlan::new(args.subsets, args.subset_size, args.seed);
    let options = EntropyOptions {
        k: args.k,
        denominator: args.common.denominator,
        method: EigenMethod::Auto,
    };
    let report = compare_many_with(&sets, &plan, options, Metric::Generic, args.test).map_err(
        |e| match &e {
            DiversityError::InSet { name, .. } => match sets.iter().position(|(n, _)| n == name) {
                Some(i) => CliError::at(&args.paths[i], e),
                None => e.into(),
            },
            _ => e.into(),
        },
    )?;
    match args.common.format {
        Format::Json => json(&report),
        Format::Human => Ok(human_report(&report)),
    }
}

fn human_report(report: &ComparisonReport) -> String {
    let mut out = String::new();
    for (name, values) in &report.per_set {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd =
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
        out.push_str(&format!(
            "{name}: {} k={} mean={mean:.6} sd={sd:.6} over {} subsets of {}\n",
            report.kind, report.k_used, report.plan.n_subsets, report.plan.subset_size
        ));
    }
    for e in &report.pairwise {
        let sig = match e.significant_at.last() {
            Some(alpha) => format!("significant at {alpha}"),
            None => "not significant".to_string(),
        };
        out.push_str(&format!(
            "{} vs {}: {} statistic={:.6} p={:.6e} ({sig})\n",
            e.set_a, e.set_b, report.test_used, e.statistic, e.p_value
        ));
    }
    out
}

#[derive(Serialize)]
struct SynthOutput {
    manifest: String,
    array: String,
    n: usize,
    d: usize,
}

pub fn synth(args: &SynthArgs) -> Result<String, CliError> {
    let preset = args.preset.preset();
    let set = generate_regime(&preset, args.n, args.d, args.seed)
        .map_err(|e| CliError::Usage(format!("--preset {}: {e}", args.preset)))?;
    fs::create_dir_all(&args.out).map_err(|e| {
        CliError::at(
            &args.out,
            DiversityError::Io {
                path: args.out.clone(),
                source: e,
            },
        )
    })?;
    let name = preset.name.name();
    let array_name = format!("{name}.npy");
    let array_path = args.out.join(&array_name);
    let manifest_path = args.out.join(format!("{name}.manifest.json"));
    let dtype = match args.dtype {
        DtypeArg::F32 => Dtype::Float32,
        DtypeArg::F64 => Dtype::Float64,
    };
    write_array(set.data(), &array_path, dtype).map_err(|e| CliError::at(&array_path, e))?;
    let manifest = SetManifest {
        set_name: name.to_string(),
        space_tag: set.space_tag(),
        files: vec![array_name],
        labels: None,
        created_by: format!(
            "diversity {} synth --preset {name} --n {} --d {} --seed {}",
            env!("CARGO_PKG_VERSION"),
            args.n,
            args.d,
            args.seed
        ),
        base_dir: args.out.clone(),
    };
    write_manifest(&manifest, &manifest_path).map_err(|e| CliError::at(&manifest_path, e))?;
    match args.format {
        Format::Json => json(&SynthOutput {
            manifest: manifest_path.display().to_string(),
            array: array_path.display().to_string(),
            n: args.n,
            d: args.d,
        }),
        Format::Human => Ok(format!(
            "wrote {} ({} x {}, {})\n",
            manifest_path.display(),
            args.n,
            args.d,
            set.space_tag()
        )),
    }
}
