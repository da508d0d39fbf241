//! Command-line front end of the `spinmzi` engine.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 verification failure,
//! 3 I/O failure.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;

use clap::Parser;

use crate::config::{Cli, FileConfig, RunConfig};
use crate::error::CliError;

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let file = match &cli.flags.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::resolve(cli.command, &cli.flags, &file)?;
    let outcome = commands::run(&cfg)?;
    let text = output::render(&outcome.table, &outcome.metadata, cfg.format);
    output::emit(cfg.out.as_deref(), &text)?;
    if outcome.failed > 0 {
        return Err(CliError::Verification {
            failed: outcome.failed,
        });
    }
    Ok(())
}
