//! The `bvsieve` command-line tool.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage or
//! validation error, 3 I/O failure, 4 resource limit exceeded.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::Parser;

use crate::config::{resolve, Cli, ScanConfig, THREADS_ENV};
use crate::error::{CliError, CliResult};

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code() as u8;
        }
    };
    match resolve(cli, std::env::var(THREADS_ENV).ok()).and_then(|c| execute(&c)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("bvsieve: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(config: &ScanConfig) -> CliResult<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Resource(format!("cannot start worker pool: {e}")))?;
    let outcome = pool.install(|| {
        commands::execute(&config.task, config.seed, config.epsilon, config.timing)
    })?;

    match &config.output {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
            outcome.table.write(config.format, BufWriter::new(file))?;
            let mut out = io::stdout().lock();
            for line in &outcome.summary {
                writeln!(out, "{}: {line}", config.task.name())?;
            }
        }
        None => {
            outcome.table.write(config.format, io::stdout().lock())?;
            let mut err = io::stderr().lock();
            for line in &outcome.summary {
                writeln!(err, "{}: {line}", config.task.name())?;
            }
        }
    }
    match outcome.violation {
        Some(msg) => Err(CliError::Violation(msg)),
        None => Ok(()),
    }
}
