use std::process::ExitCode;

use bifidelity_harness::cli::{dispatch, exit_status, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let result = dispatch(Cli::parse().command);
    if let Err(e) = &result {
        eprintln!("error: {e}");
        let mut src = std::error::Error::source(e);
        while let Some(s) = src {
            eprintln!("  caused by: {s}");
            src = s.source();
        }
    }
    ExitCode::from(exit_status(&result))
}
