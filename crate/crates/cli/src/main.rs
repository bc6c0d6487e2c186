//! `wicksys` command-line front end.
//!
//! Exit codes: 0 certified / ok, 1 refuted or Monte Carlo failure,
//! 2 malformed input, 3 policy violation, 4 inconclusive, 5 I/O failure.

mod args;
mod commands;
mod error;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use error::CliError;

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("WICKSYS_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("WICKSYS_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = init_threads().and_then(|()| commands::run(&cli));
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("wicksys: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
