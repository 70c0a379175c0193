//! `polyflame` command-line driver.
//!
//! Every command writes `<command>-<hash>.<ext>` files into the output
//! directory, where `<hash>` is derived from the resolved configuration, and
//! every JSON artifact embeds that configuration under `"config"`. Wall time
//! goes to a separate `<name>.timing.json` so the artifacts themselves are
//! reproducible byte for byte.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{execute, Outcome};
pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Compute(_) | Self::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "polyflame", version, about = "Polydisperse spray diffusion flames: fields, optimization, studies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for the GA and random iDSDs.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Evaluate γ, γ_T and T on the grid for `field.delta`.
    Field,
    /// Run the genetic algorithm.
    Optimize,
    /// Monosectional and random polysectional Ē sweeps.
    Sweep,
    /// Péclet sensitivity of the configured iDSDs.
    Pe,
    /// Spreading suite against the monosectional envelope.
    Validate,
    /// Print the resolved configuration as TOML.
    ShowConfig,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Field => "field",
            Self::Optimize => "optimize",
            Self::Sweep => "sweep",
            Self::Pe => "pe",
            Self::Validate => "validate",
            Self::ShowConfig => "show-config",
        }
    }
}

/// Parses nothing; resolves config, sets the thread pool and runs `cli.command`.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            log::warn!("thread pool already initialised: {e}");
        }
    }
    let cfg = RunConfig::resolve(cli.config.as_deref(), cli.out.clone(), cli.seed)?;
    cfg.validate()?;
    execute(cli.command, &cfg)
}
