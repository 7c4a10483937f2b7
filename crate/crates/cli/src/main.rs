//! `iurlab`: closed-form ratios, the exact oracle, and seeded benchmark experiments.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use iurlab::Error;

#[derive(Parser, Debug)]
#[command(name = "iurlab", version, about = "Information utilization ratio toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print a closed-form ratio (or the comparison-based upper bound) as JSON.
    Formula(FormulaArgs),
    /// Exact ratio of a small policy on a finite ensemble, as JSON.
    Exact(ExactArgs),
    /// Run the enumeration checks. Exits 1 if any violation is found.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Repeated seeded runs of one configuration on suite functions.
    Bench(BenchArgs),
    /// (mu, lambda)-ES sweep over mu for a fixed lambda.
    Sweep(SweepArgs),
    /// Rank several configurations and run pairwise rank-sum tests.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormulaAlgo {
    Mc,
    Lj,
    Es,
    Cmaes,
    Pso,
    Spso,
    De,
    Jade,
    /// Upper bound for any comparison-based method after `m` evaluations.
    Bound,
}

#[derive(Args, Debug)]
pub struct FormulaArgs {
    #[arg(long, value_enum)]
    pub algo: FormulaAlgo,
    /// Generations. Defaults to 1 for mc, required otherwise.
    #[arg(long)]
    pub g: Option<u64>,
    #[arg(long)]
    pub lambda: Option<u64>,
    #[arg(long)]
    pub mu: Option<u64>,
    /// Swarm or population size.
    #[arg(long)]
    pub s: Option<u64>,
    /// JADE greedy fraction.
    #[arg(long)]
    pub p: Option<f64>,
    /// DE mutation strategy.
    #[arg(long, default_value = "rand/1")]
    pub variant: String,
    /// Evaluations, for `--algo bound`.
    #[arg(long)]
    pub m: Option<u64>,
    /// Entropy of one evaluation in bits.
    #[arg(long, default_value_t = 32.0)]
    pub codomain_bits: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyChoice {
    CompareWithBest,
    FixedOrder,
    ValueIndex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EnsembleChoice {
    /// All m! orderings of distinct values.
    Injective,
    /// All n^m functions.
    All,
}

#[derive(Args, Debug)]
pub struct ExactArgs {
    #[arg(long, value_enum, default_value = "compare-with-best")]
    pub policy: PolicyChoice,
    #[arg(long, value_enum, default_value = "injective")]
    pub ensemble: EnsembleChoice,
    /// Number of points.
    #[arg(long)]
    pub m: usize,
    /// Number of values (all-functions ensemble only).
    #[arg(long)]
    pub n: Option<usize>,
    /// Evaluations.
    #[arg(long)]
    pub g: usize,
}

#[derive(Subcommand, Debug)]
pub enum VerifyTarget {
    /// Every deterministic policy on every small ensemble stays within [0, 1].
    Theorem1 {
        #[arg(long, default_value_t = 3)]
        max_m: usize,
        #[arg(long, default_value_t = 2)]
        max_n: usize,
        #[arg(long, default_value_t = 2)]
        max_g: usize,
        /// Also check this many sampled policies on an all-functions ensemble.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 4)]
        sample_m: usize,
        #[arg(long, default_value_t = 3)]
        sample_n: usize,
        #[arg(long, default_value_t = 3)]
        sample_g: usize,
        #[arg(long, default_value_t = 7)]
        sample_seed: u64,
    },
    /// Enumerated record-indicator entropy against the closed form.
    Pi {
        #[arg(long, default_value_t = 6)]
        max_g: u64,
    },
}

/// Flags shared by the experiment commands.
#[derive(Args, Debug, Clone)]
pub struct PlanArgs {
    #[arg(long)]
    pub dim: Option<usize>,
    /// Budget per run is this times the dimension.
    #[arg(long)]
    pub budget_multiplier: Option<u64>,
    #[arg(long)]
    pub runs: Option<usize>,
    /// Base seed; run r uses seed + r.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Seed of the generated shifts and rotations.
    #[arg(long)]
    pub suite_seed: Option<u64>,
    /// Function list such as `f1-f12` or `f1,f5,f8`.
    #[arg(long)]
    pub functions: Option<String>,
    /// Worker threads. Results do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, env = "IURLAB_OUT", default_value = "iurlab_out")]
    pub out: PathBuf,
    /// Rerun the request stored in a manifest written by an earlier run.
    #[arg(long)]
    pub from_manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
    /// Algorithm id (mc, lj, es, cmaes, pso, spso, de, jade).
    #[arg(long, conflicts_with = "config")]
    pub algo: Option<String>,
    /// Optimizer configuration as a JSON file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub lambda: Option<usize>,
    #[arg(long)]
    pub mu: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    /// Single function; shorthand for `--functions`.
    #[arg(long, conflicts_with = "functions")]
    pub function: Option<String>,
    /// Also write one convergence trace per run.
    #[arg(long)]
    pub traces: bool,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
    #[arg(long)]
    pub lambda: Option<usize>,
    /// Comma-separated parent counts. Defaults to 1..=lambda.
    #[arg(long, value_delimiter = ',')]
    pub mus: Vec<usize>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
    /// Comma-separated algorithm ids, each with default parameters.
    #[arg(long, value_delimiter = ',')]
    pub algos: Vec<String>,
    /// Extra configurations as JSON files, labelled by file stem.
    #[arg(long = "config")]
    pub configs: Vec<PathBuf>,
    /// Pairs to test as `first:second` labels. Defaults to all pairs.
    #[arg(long, value_delimiter = ',')]
    pub pairs: Vec<String>,
}

/// Process exit codes.
pub mod exit {
    pub const VIOLATION: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const RESOURCE: u8 = 3;
    pub const IO: u8 = 4;
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Budget { .. } | Error::Size { .. } => exit::RESOURCE,
        Error::Io(_) => exit::IO,
        Error::Data(_) => exit::VIOLATION,
        _ => exit::USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
