use std::process::ExitCode;

use clap::Parser;
use cr_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
