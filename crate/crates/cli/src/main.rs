//! `hti`: evaluate, compare, sweep and tune generalization bounds.
//!
//! Exit codes: 0 on success, 2 for argument or domain errors, 3 for I/O
//! errors.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// A failure, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) => m,
        }
    }
}

impl From<hti_core::HtiError> for CliError {
    fn from(e: hti_core::HtiError) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn run(cli: Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Bound(a) => commands::bound(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Optimize(a) => commands::optimize(&a),
        Command::Study(a) => commands::study(&a),
        Command::Crossover(a) => commands::crossover(&a),
    }
}

fn main() -> ExitCode {
    // clap exits with code 2 on usage errors and 0 for --help
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
