//! Command-line front end: JSON configs in, CSV datasets with JSON sidecars out.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use hscaler::CodeUnits;

pub use config::RunConfig;
pub use error::CliError;
use output::OutputDir;

#[derive(Debug, Parser)]
#[command(name = "hscaler", version, about = "Design and check harmonic-trap protocols that scale momentum or position")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides outputs.dir).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Ensemble seed (overrides ensemble.seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Reference trajectory and frequency program (protocol.csv).
    Design,
    /// Moment and invariant tables (moments.csv).
    Moments,
    /// Wave-packet snapshots and measured moments.
    Qsim,
    /// Classical ensemble snapshots and moment comparison.
    Csim,
    /// Wigner grids for every wave-packet snapshot.
    Wigner,
    /// Protocol figures of merit over a list of t_f or scale factors.
    Sweep,
    /// Protocol checks only (validation.json).
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Design => "design",
            Command::Moments => "moments",
            Command::Qsim => "qsim",
            Command::Csim => "csim",
            Command::Wigner => "wigner",
            Command::Sweep => "sweep",
            Command::Validate => "validate",
        }
    }
}

/// Runs one command with already-read config bytes.
pub fn run_with_bytes(cli: &Cli, bytes: &[u8]) -> Result<(), CliError> {
    let mut cfg = RunConfig::from_json_bytes(bytes)?;
    if let Some(seed) = cli.seed {
        cfg.ensemble.seed = seed;
    }
    let root = cli.out.clone().or_else(|| cfg.outputs.dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let seed = matches!(cli.command, Command::Csim).then_some(cfg.ensemble.seed);
    let out = OutputDir::new(root, cli.command.name(), bytes, seed, CodeUnits::from_spec(&cfg.spec), cli.quiet)?;
    match cli.command {
        Command::Design => commands::cmd_design(&cfg, &out),
        Command::Moments => commands::cmd_moments(&cfg, &out),
        Command::Qsim => commands::cmd_qsim(&cfg, &out),
        Command::Csim => commands::cmd_csim(&cfg, &out),
        Command::Wigner => commands::cmd_wigner(&cfg, &out),
        Command::Sweep => commands::cmd_sweep(&cfg, &out),
        Command::Validate => commands::cmd_validate(&cfg, &out),
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    run_with_bytes(cli, &bytes)
}
