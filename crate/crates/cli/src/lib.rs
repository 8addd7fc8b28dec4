//! Command-line front end: configuration loading, commands and report files.

use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;

/// Hamming-code memory fault-injection campaigns and reliability curves.
#[derive(Parser, Debug)]
#[command(name = "hamsim", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sweep every error pattern over every anchor and tabulate DC / DNC / ND.
    Simulate(RunArgs),
    /// Reliability over time and the redundancy table.
    Reliability(RunArgs),
    /// Re-render a saved JSON report as CSV tables.
    Report {
        /// report.json written by an earlier run
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "hamsim-out")]
        out: PathBuf,
    },
}

#[derive(Args, Debug, Default, Clone)]
pub struct RunArgs {
    /// TOML run configuration; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in layout name or layout file (repeatable, default: all built-ins)
    #[arg(long)]
    pub layout: Vec<String>,
    /// Pattern catalog file (default: built-in 36 patterns)
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Only report these pattern ids (repeatable)
    #[arg(long)]
    pub pattern: Vec<u32>,
    #[arg(long)]
    pub rows: Option<u32>,
    #[arg(long)]
    pub cols: Option<u32>,
    /// events | flips | placements
    #[arg(long)]
    pub counting: Option<String>,
    /// dnc3 | nd3
    #[arg(long)]
    pub policy: Option<String>,
    /// Also decode every placement for real: plain | extended
    #[arg(long)]
    pub physical: Option<String>,
    /// Seed for physical-mode data words
    #[arg(long)]
    pub seed: Option<u64>,
    /// Per-bit fault rate
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Solve the fault rate from layout:t:R
    #[arg(long)]
    pub calibrate: Option<String>,
    /// start:stop:step
    #[arg(long)]
    pub t_grid: Option<String>,
    /// Words in the memory
    #[arg(long)]
    pub words: Option<u32>,
    /// Bits per word
    #[arg(long)]
    pub word_bits: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv | json | both
    #[arg(long)]
    pub format: Option<String>,
    /// Worker threads (default: available parallelism)
    #[arg(long, env = "HAMSIM_JOBS")]
    pub jobs: Option<usize>,
}

impl Cli {
    pub fn execute(self) -> Result<()> {
        match self.command {
            Command::Simulate(args) => commands::simulate(&args),
            Command::Reliability(args) => commands::reliability(&args),
            Command::Report { input, out } => commands::render(&input, &out),
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(args)?.execute()
}
