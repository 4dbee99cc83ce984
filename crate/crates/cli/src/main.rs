//! `splab`: grow, enumerate, simulate and validate random series-parallel networks.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version go to stdout with status 0; usage errors exit 2.
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(e) = configure_threads(cli.threads) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match commands::run(cli.command) {
        Ok(commands::Outcome::Success) => ExitCode::SUCCESS,
        Ok(commands::Outcome::ValidationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}\n\nFor usage, try '--help'.");
            ExitCode::from(2)
        }
    }
}

/// `SPLAB_THREADS` wins over `--threads`; neither means all cores.
fn configure_threads(flag: Option<usize>) -> Result<(), String> {
    let threads = match std::env::var("SPLAB_THREADS") {
        Ok(v) => Some(
            v.trim().parse::<usize>().map_err(|_| format!("SPLAB_THREADS must be a positive integer, got {v:?}"))?,
        ),
        Err(_) => flag,
    };
    match threads {
        Some(0) => Err("thread count must be positive".into()),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string()),
        None => Ok(()),
    }
}
