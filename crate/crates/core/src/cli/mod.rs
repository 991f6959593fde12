//! The `missing-sums` command line: argument parsing, dispatch and exit codes.
//!
//! Exit codes: 0 when every check passed, 1 when a property that must hold
//! failed, 2 for usage, parse and precondition errors.

mod audit_cmd;
mod config;
mod container_cmd;
mod io;
mod selftest;
mod simulate;
mod svg;
mod verify;

use std::cell::RefCell;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{sha256_hex, Config, OutputFile, RunManifest};
pub use io::{InstanceFile, Output};
pub use selftest::{run_selftest, SelftestLine};
pub use svg::{tail_plot, PlotRow};

use crate::error::Error;

#[derive(Parser, Debug)]
#[command(name = "missing-sums", version, about = "Containers, tail simulations and bound audits for missing sums of random sets")]
pub struct Cli {
    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo trials per cell; overrides the config file.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// `key = value` file with C, L, K0, trials, confidence, seed.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; without it results go to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Format printed to stdout when `--out` is absent.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Monte Carlo estimates of the deficiency tail against the main bound.
    Simulate(SimulateArgs),
    /// Run a container procedure and replay it on sub-supersets.
    Container(ContainerArgs),
    /// Check Pollard's inequality, robustness, regularity or the dyadic layers.
    Verify(VerifyArgs),
    /// Evaluate bounds, union terms and elementary inequalities.
    Audit(AuditArgs),
    /// Run the zero-tolerance checks.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// JSON grid `{n, m, p, eps, trials, seed}`; list flags are ignored when given.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<u64>,
    /// Probabilities, decimal or `a/b`.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "0.25")]
    pub eps: Vec<f64>,
    /// Also write the deficiency histogram of every `(n, p)`.
    #[arg(long)]
    pub histogram: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Procedure {
    Robust,
    Iterated,
    Regular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Phase1Arg {
    Exact,
    Greedy,
}

#[derive(Args, Debug)]
pub struct ContainerArgs {
    #[arg(long, value_enum)]
    pub procedure: Procedure,
    /// Instance JSON; without it one is drawn from the seeded family.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub d: Option<u64>,
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub l: Option<String>,
    #[arg(long)]
    pub kappa: Option<String>,
    #[arg(long, value_enum, default_value_t = Phase1Arg::Exact)]
    pub phase1: Phase1Arg,
    /// Sub-supersets `F ⊆ A' ⊆ A` to replay on, besides `F` itself.
    #[arg(long, default_value_t = 5)]
    pub replays: u64,
    /// Enumeration cap for exhaustive searches.
    #[arg(long, default_value_t = 2_000_000)]
    pub cap: u128,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Pollard,
    Robust,
    Regular,
    Dyadic,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub check: Check,
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub kappa: Option<String>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub d: Option<u64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: u128,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    /// JSON audit grid; without it only the series and inequalities run.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// A `tail.csv` from `simulate`, plotted against the bound curves.
    #[arg(long)]
    pub simulated: Option<PathBuf>,
    /// Points per p-grid for union terms.
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// Points for the elementary inequality scan.
    #[arg(long, default_value_t = 10_000)]
    pub inequality_points: usize,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Scale factor for instance counts and trials.
    #[arg(long, default_value_t = 1)]
    pub scale: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Clean = 0,
    Violation = 1,
    Usage = 2,
}

impl Exit {
    pub fn worst(self, other: Exit) -> Exit {
        if (other as i32) > (self as i32) {
            other
        } else {
            self
        }
    }
}

/// Resolved global settings shared by the subcommands.
pub struct Context {
    pub cfg: Config,
    pub seed: u64,
    pub trials: u64,
    pub format: Format,
    pub out: RefCell<Output>,
    pub seed_flag: Option<u64>,
    pub trials_flag: Option<u64>,
}

fn exit_for(e: &Error) -> Exit {
    match e {
        Error::InvariantViolated(_) => Exit::Violation,
        _ => Exit::Usage,
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Exit::Usage as i32 } else { 0 };
        }
    };
    let code = match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    };
    code as i32
}

fn execute(cli: Cli) -> crate::Result<Exit> {
    let cfg = Config::load(cli.config.as_deref())?;
    let ctx = Context {
        seed: cli.seed.unwrap_or(cfg.seed),
        trials: cli.trials.unwrap_or(cfg.trials),
        format: cli.format,
        out: RefCell::new(Output::new(cli.out.clone())?),
        seed_flag: cli.seed,
        trials_flag: cli.trials,
        cfg,
    };
    let workers = cli.workers;
    if workers == Some(0) {
        return Err(Error::Parse("--workers must be positive".into()));
    }
    crate::montecarlo::with_workers(workers, move || match &cli.command {
        Command::Simulate(a) => simulate::run(&ctx, a),
        Command::Container(a) => container_cmd::run(&ctx, a),
        Command::Verify(a) => verify::run(&ctx, a),
        Command::Audit(a) => audit_cmd::run(&ctx, a),
        Command::Selftest(a) => selftest::run(&ctx, a),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["missing-sums", "nonsense"]), 2);
        assert_eq!(run(["missing-sums", "simulate", "--n", "x"]), 2);
        assert_eq!(run(["missing-sums", "--help"]), 0);
    }

    #[test]
    fn parses_global_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["missing-sums", "simulate", "--n", "10,20", "--seed", "4", "--format", "json"]).unwrap();
        assert_eq!(cli.seed, Some(4));
        assert_eq!(cli.format, Format::Json);
        match cli.command {
            Command::Simulate(a) => assert_eq!(a.n, vec![10, 20]),
            _ => panic!("wrong subcommand"),
        }
    }
}
