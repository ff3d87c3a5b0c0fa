//! File formats, configuration and report emission for the `rcnn` tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod pgm;
pub mod pulses;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use error::{CliError, CsvError, PgmError, Result};
pub use report::Report;

#[derive(Debug, Parser)]
#[command(
    name = "rcnn",
    version,
    about = "Random-coupled neural network pipelines"
)]
pub struct Cli {
    /// Worker threads for the parallel pipelines; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Record per-stage wall-clock times in the report.
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every command.
#[derive(Debug, Args)]
pub struct Common {
    /// Output directory; created if missing.
    #[arg(long)]
    pub out: PathBuf,

    /// Seed for every stochastic stage.
    #[arg(long)]
    pub seed: u64,

    /// TOML file of flat `key = value` settings.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// `key=value` override, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment a PGM image from its ignition map.
    Segment {
        #[arg(long)]
        input: PathBuf,
        /// Ground-truth mask (PGM, foreground >= 128) for PA/IoU/Dice.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Fuse two or more registered PGM images.
    Fuse {
        #[arg(long = "input", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Pulse shape discrimination on a pulse CSV.
    Psd {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Spike rasters for the ramp or video encoding stimulus.
    EncodeDemo {
        #[command(flatten)]
        common: Common,
    },
}

pub fn run(cli: &Cli) -> Result<Report> {
    commands::execute(&cli.command, cli.timing)
}
