//! Command-line front end for `tto-core`.
//!
//! Exit codes: 0 on success, 2 for configuration or precondition errors,
//! 3 for numerical failures.

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use thiserror::Error;
use tto_core::TtoError;

pub use config::{ProblemConfig, ToleranceOverrides};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Solver(#[from] TtoError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(e) if e.is_input_error() => 2,
            CliError::Solver(_) | CliError::Io(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tto",
    version,
    about = "Eigenvalues of truncated Toeplitz operators on model spaces"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by all subcommands. Command-line values override the config.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Problem configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for report files.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Scan grid resolution per axis.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Truncation order K of eigenfunction expansions.
    #[arg(long, global = true)]
    pub truncation: Option<usize>,
    /// Residual gate for eigenpairs.
    #[arg(long, global = true)]
    pub tol_res: Option<f64>,
    /// Contour inset for the three-term solver.
    #[arg(long, global = true)]
    pub inset: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan a region for eigenvalues (writes eigenpairs.json, scan.csv, spectrum.svg).
    Scan,
    /// Solve Φ = a z̄ + b + c z through the annulus equation (writes three_term.json, annulus.svg).
    ThreeTerm(ThreeTermArgs),
    /// Dense matrix and spectrum for a finite Blaschke product (writes oracle.json).
    Oracle,
    /// Image test for Φ = a z̄ + b + c z (writes spe.json).
    Spe(CoefficientArgs),
    /// Evaluate θ at points (writes inner.json).
    InnerEval(InnerEvalArgs),
}

/// Coefficients written as `re` or `re,im`.
#[derive(Debug, Clone, Args)]
pub struct CoefficientArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub a: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
    pub b: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub c: C64,
}

#[derive(Debug, Clone, Args)]
pub struct ThreeTermArgs {
    #[command(flatten)]
    pub coefficients: CoefficientArgs,
    /// Number of straddling λ samples for the exclusion check.
    #[arg(long, default_value_t = 200)]
    pub mixed_samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct InnerEvalArgs {
    /// Evaluation point `re,im`; repeatable.
    #[arg(long = "z", value_parser = parse_complex, allow_hyphen_values = true, required = true)]
    pub points: Vec<C64>,
}

pub fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
    let z = match parts.as_slice() {
        [re] => C64::new(num(re)?, 0.0),
        [re, im] => C64::new(num(re)?, num(im)?),
        _ => return Err(format!("expected re or re,im, got {s:?}")),
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(format!("non-finite value {s:?}"));
    }
    Ok(z)
}

/// Applies `TTO_THREADS` when set.
pub fn configure_threads_from_env() -> Result<(), CliError> {
    match std::env::var("TTO_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| CliError::Config(format!("TTO_THREADS must be a positive integer, got {v:?}")))?;
            tto_core::parallel::configure_threads(n);
            Ok(())
        }
        Err(_) => Ok(()),
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = configure_threads_from_env().and_then(|_| commands::dispatch(&cli));
    match result {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_arguments() {
        assert_eq!(parse_complex("4").unwrap(), C64::new(4.0, 0.0));
        assert_eq!(parse_complex("-1, 0.5").unwrap(), C64::new(-1.0, 0.5));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("x").is_err());
        assert!(parse_complex("nan").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(
            CliError::Solver(TtoError::InvalidInput("empty region".into())).exit_code(),
            2
        );
        assert_eq!(CliError::Solver(TtoError::NoConvergence("x".into())).exit_code(), 3);
    }

    #[test]
    fn negative_coefficients_parse() {
        let cli = Cli::try_parse_from(["tto", "spe", "--a", "-1", "--c", "0.1,-2"]).unwrap();
        match cli.command {
            Command::Spe(args) => {
                assert_eq!(args.a, C64::new(-1.0, 0.0));
                assert_eq!(args.c, C64::new(0.1, -2.0));
            }
            _ => panic!("wrong subcommand"),
        }
    }
}
