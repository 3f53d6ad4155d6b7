use std::process::ExitCode;

use clap::Parser;
use prepush::cli::{self, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    match cli::run(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
