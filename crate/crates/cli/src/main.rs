//! `sthresh`: layout inspection, Monte Carlo threshold runs, analysis,
//! decoder benchmarks and the oracle validation suite.

mod bench;
mod config;
mod mc;
mod output;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use surface_threshold::rbim::Adjacency;

use crate::config::RunConfig;
use crate::output::OutDir;

#[derive(Debug, Parser)]
#[command(name = "sthresh", version, about = "Surface-code thresholds under correlated pair noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Continue interrupted runs from their checkpoints.
    #[arg(long, global = true)]
    resume: bool,

    /// Print the planned work and write nothing.
    #[arg(long, global = true)]
    dry_run: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the oracle suite and report pass/fail per check.
    Validate {
        /// Spin labelling used by the statistical-mechanics check.
        #[arg(long, value_enum, default_value_t = AdjacencyArg::Standard)]
        adjacency: AdjacencyArg,
    },
    /// Print the code layout and error-edge map for one distance.
    Layout {
        #[arg(long, default_value_t = 3)]
        distance: usize,
        #[arg(long, default_value_t = 0.03)]
        p1: f64,
        #[arg(long, default_value_t = 0.03)]
        p2: f64,
    },
    /// Parallel-tempering runs for every (p, L) of the `[mc]` section.
    McRun,
    /// Correlation-length curves, crossing verdicts and the threshold scan.
    Analyze,
    /// Logical error rates of both matching decoders and their thresholds.
    DecodeBench,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AdjacencyArg {
    Standard,
    Transposed,
}

#[derive(Debug)]
pub enum CliError {
    /// A check failed or a threshold was not bracketed.
    Check(String),
    Usage(String),
    Io(String),
}

impl From<surface_threshold::Error> for CliError {
    fn from(e: surface_threshold::Error) -> Self {
        match e {
            surface_threshold::Error::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if cli.seed.is_some() {
        config.seed = cli.seed;
    }
    let out = OutDir::new(cli.out.clone().or(config.out.clone()).unwrap_or_else(|| PathBuf::from("results")));

    match cli.command {
        Command::Validate { adjacency } => {
            let adjacency = match adjacency {
                AdjacencyArg::Standard => Adjacency::Standard,
                AdjacencyArg::Transposed => Adjacency::Transposed,
            };
            validate::validate(adjacency)
        }
        Command::Layout { distance, p1, p2 } => validate::layout(distance, p1, p2),
        Command::McRun => mc::mc_run(&config, &out, cli.resume, cli.dry_run),
        Command::Analyze => {
            if cli.dry_run {
                return Ok(());
            }
            match mc::analyze(&config, &out)? {
                true => Ok(()),
                false => Err(CliError::Check("threshold not bracketed or too few sizes".into())),
            }
        }
        Command::DecodeBench => bench::decode_bench(&config, &out, cli.dry_run),
    }
}
