use std::process::ExitCode;

use annealsched_cli::error::CliError;
use annealsched_cli::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Calibration { trace, .. } = &e {
                if !trace.is_empty() {
                    let t: Vec<String> = trace.iter().map(|x| format!("{x:.5}")).collect();
                    eprintln!("mean |delta| trace: {}", t.join(" "));
                }
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
