//! Command-line front end: `rootwave sum | constant | verify`.
//!
//! Exit codes: 0 success, 1 property violation, 2 invalid input,
//! 3 scale or overflow guard, 4 resume mismatch.

pub mod commands;
pub mod grammar;
pub mod record;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::{cmd_constant, cmd_sum, cmd_verify};

pub const THREADS_ENV: &str = "ROOTWAVE_THREADS";

const GRAMMAR_HELP: &str = "\
Polynomial grammar (whitespace ignored):
  poly := pair* [\"*q\"]          at least one factor
  pair := \"(\" int \",\" int \")\"   the factor a*n + b, gcd(a, b) = 1, a != 0
  *q   appends the factor n^2 + 1
Examples: \"(1,0)(1,1)\" is n(n+1); \"(1,0)*q\" is n(n^2+1).

Exit codes: 0 ok, 1 violation, 2 invalid input, 3 scale guard, 4 resume mismatch.
Default thread count comes from ROOTWAVE_THREADS.";

#[derive(Debug, Parser)]
#[command(name = "rootwave", version, about = "Exponential sums over roots of polynomials modulo n", after_help = GRAMMAR_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// S(f, x, h) at checkpoints, as CSV or a JSON run record.
    Sum(SumArgs),
    /// Main-term constants with truncation tail bounds.
    Constant(ConstantArgs),
    /// Property sweeps; exits 1 on any violation.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
#[command(after_help = GRAMMAR_HELP)]
pub struct SumArgs {
    /// Polynomial, e.g. "(1,0)(1,1)(2,1)" or "(1,0)*q". Taken from the record when resuming.
    #[arg(long)]
    pub poly: Option<String>,
    #[arg(long)]
    pub x: u64,
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<i64>,
    /// Comma-separated list, or "decades" for 10, 100, ... up to x.
    #[arg(long)]
    pub checkpoints: Option<String>,
    /// Output path ending in .csv or .json; CSV on stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// JSON run record to extend from its last checkpoint.
    #[arg(long)]
    pub resume: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Quadratic,
    General,
    Thm2,
    Thm3,
}

#[derive(Debug, Clone, Args)]
pub struct ConstantArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub d: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<i64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub pmax: u64,
    #[arg(long, default_value_t = 10_000)]
    pub deltamax: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lemma1,
    Gauss,
    K1k2,
    Weil,
    Aprocess,
    Parity,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Seed for the randomized suites; each has a committed default.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Suite size: q bound (lemma1), l bound (gauss), instances (k1k2),
    /// functions (weil), trials (aprocess), prime bound (parity).
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Scale(String),
    #[error("{0}")]
    Resume(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Scale(_) => 3,
            CliError::Resume(_) => 4,
        }
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Sum(a) => cmd_sum(a, out),
        Command::Constant(a) => cmd_constant(a, out),
        Command::Verify(a) => cmd_verify(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
