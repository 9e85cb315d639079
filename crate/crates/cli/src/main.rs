//! `simo`: experiment runner for the SIMO ad hoc network toolkit.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error,
//! 3 numerical failure (for example a vacuous bound requested explicitly).
//! No output file is written unless the run succeeds.

mod commands;
mod output;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use commands::Experiment;
use params::Params;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<simo_core::Error> for CliError {
    fn from(e: simo_core::Error) -> Self {
        use simo_core::Error as E;
        match e {
            E::InvalidConfig(_)
            | E::TooManyCancelled { .. }
            | E::SingularSampleCovariance { .. }
            | E::DimensionMismatch { .. }
            | E::NonPositiveArgument(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "simo", version, about = "Receive-diversity ad hoc network experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outage probability at one density.
    Outage(RunArgs),
    /// Maximum density at outage level epsilon.
    Density(RunArgs),
    /// Analytic outage and density bounds.
    Bounds(RunArgs),
    /// MMSE filter correlation versus path loss exponent.
    Fig2(RunArgs),
    /// Density versus antennas, alpha = 3, with bounds.
    Fig3(RunArgs),
    /// Density versus antennas, alpha = 4, with bounds.
    Fig4(RunArgs),
    /// Density versus number of interference snapshots.
    Fig5(RunArgs),
    /// Expected forward progress versus transmit probability.
    Fig7(RunArgs),
    /// Grid versus Poisson interferer placement.
    Fig8(RunArgs),
    /// Vary one parameter over a list of values.
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file of `key = value` lines.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Output file (default: `<output-dir>/<experiment>.csv`).
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, env = "SIMO_OUTPUT_DIR", default_value = ".")]
    output_dir: PathBuf,
    /// Parameter overrides.
    #[arg(value_name = "KEY=VALUE")]
    params: Vec<String>,
}

impl Command {
    fn split(self) -> (Experiment, RunArgs) {
        match self {
            Command::Outage(a) => (Experiment::Outage, a),
            Command::Density(a) => (Experiment::Density, a),
            Command::Bounds(a) => (Experiment::Bounds, a),
            Command::Fig2(a) => (Experiment::Fig2, a),
            Command::Fig3(a) => (Experiment::Fig3, a),
            Command::Fig4(a) => (Experiment::Fig4, a),
            Command::Fig5(a) => (Experiment::Fig5, a),
            Command::Fig7(a) => (Experiment::Fig7, a),
            Command::Fig8(a) => (Experiment::Fig8, a),
            Command::Sweep(a) => (Experiment::Sweep, a),
        }
    }
}

fn execute(exp: Experiment, args: RunArgs) -> Result<PathBuf, CliError> {
    let mut p = Params::new();
    if let Some(path) = &args.config {
        p.load_file(path)?;
    }
    for raw in &args.params {
        p.set_pair(raw)?;
    }
    if let Some(s) = args.seed {
        p.set("seed", s);
    }
    if let Some(t) = args.trials {
        p.set("trials", t);
    }
    if let Some(t) = args.threads {
        p.set("threads", t);
    }
    if let Some(o) = &args.output {
        p.set("output", o.display());
    }
    // Neither affects the results, so neither goes into the header.
    let threads = p.hidden_usize("threads", 0)?;
    let target = p
        .hidden_string("output")
        .map(PathBuf::from)
        .unwrap_or_else(|| args.output_dir.join(format!("{}.csv", exp.name())));
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {threads} threads: {e}")))?;
    }

    let artifact = commands::run(exp, &mut p)?;
    let mut header = vec![
        format!("simo {}", env!("CARGO_PKG_VERSION")),
        format!("experiment={}", exp.name()),
    ];
    header.extend(p.resolved().iter().map(|(k, v)| format!("{k}={v}")));
    header.extend(artifact.notes);
    let bytes = artifact.table.render(&header)?;
    output::write_artifact(&target, &bytes)?;
    Ok(target)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (exp, args) = cli.command.split();
    match execute(exp, args) {
        Ok(path) => {
            eprintln!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("simo: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
