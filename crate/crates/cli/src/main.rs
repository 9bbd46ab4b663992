//! `soliton`: generate soliton tables, solve toric initial value problems,
//! run verification suites and compute holomorphic data.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or parse error,
//! 3 domain error (point outside the domain, degenerate data, …).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod gen;
mod model;
mod resonance;
mod toric;
mod verify;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use soliton_core::Error;

#[derive(Parser)]
#[command(name = "soliton", version, about = "Gradient Kähler Ricci solitons at desk scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate a family or series solution on a grid.
    Gen(gen::GenArgs),
    /// Run verification checks and write a report.
    Verify(verify::VerifyArgs),
    /// Solve the toric singular initial value problem.
    Toric(toric::ToricArgs),
    /// Resonance count, lattice and torus rank for eigenvalues h.
    Resonance(resonance::ResonanceArgs),
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    ChecksFailed,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Domain(m) => write!(f, "domain error: {m}"),
            CliError::ChecksFailed => write!(f, "one or more checks failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::InvalidParam(_)
            | Error::ShapeMismatch(_)
            | Error::DimensionTooLarge(_)
            | Error::IrrationalInput(_) => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

pub fn io_error(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Toric(a) => toric::run(a),
        Command::Resonance(a) => resonance::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(match e {
                CliError::ChecksFailed => 1,
                CliError::Usage(_) => 2,
                CliError::Domain(_) => 3,
            })
        }
    }
}
