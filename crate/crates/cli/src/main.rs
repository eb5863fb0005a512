//! `pdqubo` command-line driver.
//!
//! Exit codes: 0 success, 2 input error, 3 solver failure.

mod case;
mod commands;
mod fail;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "pdqubo",
    version,
    about = "Discrete/continuous decomposition of process-design problems"
)]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "PDQUBO_OUT", default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the binary program, its QUBO and the reformulation map.
    Build(BuildArgs),
    /// Run a discrete engine and write a sample file.
    Solve(SolveArgs),
    /// Time-to-target and diversity table for one or more sample files.
    Report(ReportArgs),
    /// Solve the continuous subproblem of every feasible configuration and
    /// mark the Pareto front.
    Sweep(SweepArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseKind {
    Il,
    Ds,
    Custom,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CaseArgs {
    /// Bundled case study or a custom program.
    #[arg(long, value_enum)]
    case: CaseKind,
    /// Binary-program JSON (required for `--case custom`).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Design-space JSON replacing the bundled coefficients.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Uniform penalty weight (default 1 + sum |c|).
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct BuildArgs {
    #[command(flatten)]
    #[serde(flatten)]
    case: CaseArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Oracle,
    Sa,
    Bb,
    BbPool,
    BbEnumerate,
    Import,
}

#[derive(Args, Debug, Serialize)]
struct SolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    case: CaseArgs,
    #[arg(long, value_enum)]
    solver: SolverKind,
    #[arg(long, default_value_t = 1000)]
    reads: usize,
    #[arg(long, default_value_t = 1000)]
    sweeps: usize,
    #[arg(long)]
    beta_hot: Option<f64>,
    #[arg(long)]
    beta_cold: Option<f64>,
    /// Pool size for `bb-pool`.
    #[arg(long, default_value_t = 10)]
    pool_size: usize,
    /// Sample file to import.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Recompute imported energies against the QUBO; mismatches are fatal.
    #[arg(long)]
    recompute: bool,
    /// Random seed; drawn and printed when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Record this run time (seconds) instead of the measured wall clock,
    /// which makes repeated runs byte-identical.
    #[arg(long)]
    tau: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetKind {
    Opt,
    Feas,
    Both,
}

#[derive(Args, Debug, Serialize)]
struct ReportArgs {
    /// Sample files, one table row each.
    #[arg(required = true)]
    samples: Vec<PathBuf>,
    /// Case whose oracle provides the optimum and the feasible set.
    #[arg(long, value_enum)]
    case: Option<CaseKind>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    params: Option<PathBuf>,
    /// Oracle sample file used as reference instead of `--case`.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TargetKind::Both)]
    target: TargetKind,
    /// Target confidence.
    #[arg(long, default_value_t = 0.99)]
    s: f64,
    /// Histogram bins for the diversity report.
    #[arg(long, default_value_t = 10)]
    bins: usize,
    /// Bootstrap seed; drawn and printed when absent.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    case: CaseArgs,
    /// Evaluation budget per configuration.
    #[arg(long, default_value_t = 20_000)]
    budget: usize,
    #[arg(long, default_value_t = 20)]
    starts: usize,
    /// CSV `config_id,score` with externally computed continuous scores
    /// (minimized); required for cases without a built-in evaluator.
    #[arg(long)]
    scores: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build(a) => commands::build(&cli.out, a),
        Command::Solve(a) => commands::solve(&cli.out, a),
        Command::Report(a) => commands::report(&cli.out, a),
        Command::Sweep(a) => commands::sweep(&cli.out, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
