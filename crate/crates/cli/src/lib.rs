//! Command-line driver for the XXZ and Bose-Hubbard experiments.

pub mod analysis;
pub mod cache;
pub mod config;
pub mod error;
pub mod families;
pub mod run;
pub mod table;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::run::Command;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Subcommand {
    Spectrum,
    Eth,
    Submatrix,
    Sff,
    Entropy,
    BoseHubbard,
    All,
}

impl From<Subcommand> for Command {
    fn from(s: Subcommand) -> Self {
        match s {
            Subcommand::Spectrum => Command::Spectrum,
            Subcommand::Eth => Command::Eth,
            Subcommand::Submatrix => Command::Submatrix,
            Subcommand::Sff => Command::Sff,
            Subcommand::Entropy => Command::Entropy,
            Subcommand::BoseHubbard => Command::BoseHubbard,
            Subcommand::All => Command::All,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ethspec", version, about = "Spectral statistics and ETH diagnostics of the XXZ chain and Bose-Hubbard model")]
struct Args {
    #[arg(value_enum)]
    command: Subcommand,
    /// TOML experiment file; omitted sections take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; falls back to ETHSPEC_THREADS, then all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides `sweep.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `xxz.sites`.
    #[arg(long)]
    system_size: Option<usize>,
    /// Recompute every eigendecomposition instead of reading the cache.
    #[arg(long)]
    no_cache: bool,
}

fn execute(args: Args) -> Result<run::RunReport, CliError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(dir) = args.out {
        cfg.output.dir = dir;
    }
    if let Some(seed) = args.seed {
        cfg.sweep.seed = seed;
    }
    if let Some(l) = args.system_size {
        cfg.xxz.sites = l;
    }
    if args.no_cache {
        cfg.output.cache = false;
    }
    let threads = match args.threads {
        Some(n) => Some(n),
        None => match std::env::var("ETHSPEC_THREADS") {
            Ok(v) => Some(v.parse().map_err(|_| CliError::Config(format!("ETHSPEC_THREADS: not a count: {v:?}")))?),
            Err(_) => None,
        },
    };
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config("threads: must be at least 1".into()));
        }
        ethspec::configure_threads(n);
    }
    run::run(args.command.into(), &cfg)
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(args) {
        Ok(report) => {
            for f in &report.files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
