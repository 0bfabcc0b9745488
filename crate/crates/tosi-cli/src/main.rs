//! `tosi` — two-directional simultaneous inference from the command line.
//!
//! Subcommands: `test` (run ToMax/ToMin on CSV data), `simulate`
//! (size/power Monte Carlo tables), and `tune` (TOSI-guided lasso penalty
//! selection). All reports are JSON with stable key order and an embedded
//! seed, so every run can be reproduced afterwards.

mod commands;
mod io;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::hash::{BuildHasher, Hasher, RandomState};
use std::path::PathBuf;

/// Command failure with the process exit code to report:
/// 2 = input/config error, 3 = numerical failure.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: String) -> Self {
        Self { code: 2, message }
    }
    pub fn numeric(message: String) -> Self {
        Self { code: 3, message }
    }
}

/// Seed drawn from OS entropy when the user omits --seed; it is echoed in
/// the report so the run stays reproducible.
pub fn entropy_seed() -> u64 {
    RandomState::new().build_hasher().finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Mean,
    Regression,
    Factor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Tomax,
    Tomin,
    Both,
}

#[derive(Parser)]
#[command(name = "tosi", version, about = "Two-directional simultaneous inference")]
struct Cli {
    /// Cap on the worker-thread pool (default: $TOSI_THREADS, else 1).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run ToMax/ToMin tests on a CSV dataset.
    Test(TestArgs),
    /// Reproduce size/power Monte Carlo tables.
    Simulate(SimulateArgs),
    /// Select a lasso penalty by sequential two-directional testing.
    Tune(TuneArgs),
}

#[derive(Args)]
pub struct TestArgs {
    /// CSV data file (header row required).
    #[arg(long)]
    data: PathBuf,
    /// Estimator backend.
    #[arg(long, value_enum)]
    model: Model,
    /// Which direction(s) to test.
    #[arg(long, value_enum)]
    mode: Mode,
    /// Assumed-zero index set (1-based, one per line, '#' comments).
    #[arg(long)]
    zero_set: Option<PathBuf>,
    /// Assumed-nonzero index set (same format).
    #[arg(long)]
    nonzero_set: Option<PathBuf>,
    /// Response column name (regression only).
    #[arg(long)]
    response: Option<String>,
    /// Number of latent factors (factor only).
    #[arg(long)]
    q: Option<usize>,
    /// Number of sample splits L.
    #[arg(long, default_value_t = 1)]
    splits: usize,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// RNG seed; drawn from entropy and echoed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Report path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Experiment: mean, exp1/regression, or exp2/factor.
    #[arg(long)]
    experiment: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long = "sigma-sq")]
    sigma_sq: Option<f64>,
    /// Monte Carlo replicates.
    #[arg(long)]
    reps: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Split counts L (repeatable); default 1 and 8.
    #[arg(long = "L")]
    l: Vec<usize>,
    /// Set-family labels (repeatable, e.g. G11); default all twelve.
    #[arg(long = "gset")]
    gset: Vec<String>,
    /// RNG seed; drawn from entropy and echoed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Report path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct TuneArgs {
    /// Main sample (the TOSI tests run here).
    #[arg(long)]
    main: PathBuf,
    /// Independent extra sample (the lasso path and supports come from here).
    #[arg(long)]
    extra: PathBuf,
    /// Response column name, shared by both files.
    #[arg(long)]
    response: String,
    /// Lambda grid: comma list "0.4,0.2,0.1" or geometric "min:max:count".
    #[arg(long)]
    grid: String,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Number of sample splits L for each directional test.
    #[arg(long, default_value_t = 1)]
    splits: usize,
    /// RNG seed; drawn from entropy and echoed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Proceed even when main and extra files are byte-identical.
    #[arg(long, default_value_t = false)]
    allow_overlap: bool,
    /// Report path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn resolve_threads(flag: Option<usize>) -> Result<usize, CliError> {
    let threads = match flag {
        Some(t) => t,
        None => match std::env::var("TOSI_THREADS") {
            Ok(v) => v
                .parse()
                .map_err(|_| CliError::input(format!("TOSI_THREADS is not a count: '{v}'")))?,
            Err(_) => 1,
        },
    };
    if threads == 0 {
        return Err(CliError::input("--threads must be at least 1".into()));
    }
    Ok(threads)
}

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let command = argv.join(" ");
    let cli = Cli::parse();
    let run = resolve_threads(cli.threads).and_then(|threads| match &cli.command {
        Command::Test(args) => commands::cmd_test(args, threads, &command),
        Command::Simulate(args) => commands::cmd_simulate(args, threads, &command),
        Command::Tune(args) => commands::cmd_tune(args, threads, &command),
    });
    if let Err(e) = run {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}
