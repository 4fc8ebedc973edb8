//! Command-line front end for `hsiem-core`.
//!
//! [`run`] parses arguments (optionally merged with a `--config` file),
//! executes one subcommand and returns the process exit code:
//! `0` on success, `1` when a check fails or a computation errors, `2` on
//! usage errors. CSV schemas are documented in `docs/formats.md`.

// `!(x > 0.0)` rejects NaN on purpose; index loops follow the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;

use clap::Parser;
use thiserror::Error;

use args::Cli;
use config::{take_config_path, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] hsiem_core::Error),
    #[error("i/o: {0}")]
    Io(String),
    /// The reader closed stdout early, as in `hsiem dtn | head`.
    #[error("broken pipe")]
    BrokenPipe,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

/// Worker count for parameter sweeps from `HSIEM_THREADS` (unset: rayon's default).
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("HSIEM_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("HSIEM_THREADS must be a positive integer, got '{v}'")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Io(e.to_string()))
}

fn prepare(argv: Vec<OsString>) -> Result<Vec<String>, CliError> {
    let mut argv = argv
        .into_iter()
        .map(|a| a.into_string().map_err(|a| CliError::Usage(format!("argument is not UTF-8: {a:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(path) = take_config_path(&mut argv)? {
        RunConfig::load(path.as_ref())?.merge_into(&mut argv);
    }
    Ok(argv)
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv = match prepare(argv.into_iter().map(Into::into).collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("hsiem: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = thread_pool().and_then(|pool| pool.install(|| commands::execute(&cli.command)));
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILURE,
        Err(CliError::BrokenPipe) => EXIT_OK,
        Err(e) => {
            eprintln!("hsiem: {e}");
            e.exit_code()
        }
    }
}
