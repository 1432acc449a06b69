//! `diversity`: truncated-entropy diversity and Fréchet-distance quality for
//! sets of latent embeddings.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical error.

mod args;
mod commands;
mod input;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use latent_diversity::{DiversityError, ErrorClass};

use crate::args::{Cli, Command};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core {
        path: Option<PathBuf>,
        source: DiversityError,
    },
}

impl CliError {
    pub fn at(path: &Path, source: DiversityError) -> Self {
        CliError::Core {
            path: Some(path.to_path_buf()),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core { source, .. } => match source.class() {
                ErrorClass::Usage => EXIT_USAGE,
                ErrorClass::Data => EXIT_DATA,
                ErrorClass::Numerical => EXIT_NUMERICAL,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Core { path, source } => {
                let msg = source.to_string();
                match path {
                    Some(p) if !msg.contains(&p.display().to_string()) => {
                        write!(f, "{}: {msg}", p.display())
                    }
                    _ => f.write_str(&msg),
                }
            }
        }
    }
}

impl From<DiversityError> for CliError {
    fn from(source: DiversityError) -> Self {
        CliError::Core { path: None, source }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Entropy(a) => commands::entropy(&a),
        Command::Fid(a) => commands::fid(&a),
        Command::Compare(a) => commands::compare(&a),
        Command::Synth(a) => commands::synth(&a),
    };
    match result {
        Ok(stdout) => {
            print!("{stdout}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
