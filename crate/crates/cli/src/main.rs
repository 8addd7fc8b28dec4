use std::process::ExitCode;

use clap::Parser;
use hamsim_cli::Cli;

fn main() -> ExitCode {
    match Cli::parse().execute() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hamsim: {e:#}");
            ExitCode::FAILURE
        }
    }
}
