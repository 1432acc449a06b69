use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use latent_diversity::stats::SignificanceTest;
use latent_diversity::synth::Regime;
use latent_diversity::{Denominator, SpaceTag, DEFAULT_K};

/// Diversity (truncated entropy) and quality (Fréchet distance) of sets of
/// latent embeddings.
#[derive(Debug, Parser)]
#[command(name = "diversity", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Truncated entropy of each input set (TIE for inception2048, TCE for clip512).
    Entropy(EntropyArgs),
    /// Fréchet distance between a reference and a generated set.
    Fid(FidArgs),
    /// Resampled score distributions and pairwise significance tests.
    Compare(CompareArgs),
    /// Writes a synthetic regime set as an array file plus manifest.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DtypeArg {
    F32,
    F64,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "human")]
    pub format: Format,

    /// Covariance normalisation: n-1 (unbiased) or n.
    #[arg(long, default_value = "n-1", value_parser = parse_denominator)]
    pub denominator: Denominator,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// Array files, directories of array files, or set manifests.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,

    /// Number of leading eigenvalues.
    #[arg(long, default_value_t = DEFAULT_K, value_parser = positive)]
    pub k: usize,

    /// Latent space of raw array inputs (inception2048, clip512 or custom:D).
    #[arg(long, value_parser = parse_space)]
    pub space: Option<SpaceTag>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct FidArgs {
    /// Reference set (array file, directory or manifest).
    pub reference: PathBuf,
    /// Generated set (array file, directory or manifest).
    pub generated: PathBuf,

    #[arg(long, value_parser = parse_space)]
    pub space: Option<SpaceTag>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Set manifests (or array files / directories), at least two.
    #[arg(required = true, num_args = 2..)]
    pub paths: Vec<PathBuf>,

    #[arg(long, default_value_t = DEFAULT_K, value_parser = positive)]
    pub k: usize,

    #[arg(long, value_parser = parse_space)]
    pub space: Option<SpaceTag>,

    /// Seed of the subset draws.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Number of random subsets per set.
    #[arg(long, default_value_t = 10, value_parser = at_least_two)]
    pub subsets: usize,

    /// Rows per subset.
    #[arg(long = "subset-size", default_value_t = 30, value_parser = at_least_two)]
    pub subset_size: usize,

    /// Two-sample test: mann-whitney-u or welch-t.
    #[arg(long, default_value = "mann-whitney-u", value_parser = parse_test)]
    pub test: SignificanceTest,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// control_low, control_high, usual, unusual or style.
    #[arg(long, value_parser = parse_regime)]
    pub preset: Regime,

    /// Number of rows.
    #[arg(long, default_value_t = 45, value_parser = positive)]
    pub n: usize,

    /// Latent dimension.
    #[arg(long, default_value_t = 512, value_parser = positive)]
    pub d: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output directory; receives <preset>.npy and <preset>.manifest.json.
    #[arg(long)]
    pub out: PathBuf,

    /// Element type of the array file.
    #[arg(long, value_enum, default_value = "f32")]
    pub dtype: DtypeArg,

    #[arg(long, value_enum, default_value = "human")]
    pub format: Format,
}

fn parse_space(s: &str) -> Result<SpaceTag, String> {
    s.parse()
        .map_err(|e: latent_diversity::DiversityError| e.to_string())
}

fn parse_denominator(s: &str) -> Result<Denominator, String> {
    s.parse()
        .map_err(|e: latent_diversity::DiversityError| e.to_string())
}

fn parse_test(s: &str) -> Result<SignificanceTest, String> {
    s.parse()
        .map_err(|e: latent_diversity::DiversityError| e.to_string())
}

fn parse_regime(s: &str) -> Result<Regime, String> {
    s.parse()
        .map_err(|e: latent_diversity::DiversityError| e.to_string())
}

fn at_least(s: &str, min: usize) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v < min {
        return Err(format!("must be at least {min}"));
    }
    Ok(v)
}

fn positive(s: &str) -> Result<usize, String> {
    at_least(s, 1)
}

fn at_least_two(s: &str) -> Result<usize, String> {
    at_least(s, 2)
}
