//! Command-line front end: class parsing, job execution and report rendering.

pub mod args;
pub mod model;
pub mod parse;
pub mod render;
pub mod run;
pub mod selftest;

use std::io::Write;

use crate::args::{Cli, JobSpec};
use crate::parse::ParseError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{flag}: {err}")]
    Parse { flag: String, err: ParseError },
    #[error("class is not ample: {0}")]
    NotAmple(String),
    #[error(transparent)]
    Core(#[from] dp1kstab_core::error::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 usage or parse, 2 not ample, 3 internal failure.
    pub fn exit_code(&self) -> u8 {
        use dp1kstab_core::error::Error;
        match self {
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Io(_) => 1,
            CliError::NotAmple(_) | CliError::Core(Error::NotAmple { .. }) => 2,
            CliError::Core(_) => 3,
        }
    }
}

/// Validate, run and write the report; returns the exit code.
pub fn run_cli(cli: &Cli) -> Result<u8, CliError> {
    let job = JobSpec::try_from(cli)?;
    let out = run::run(&job)?;
    match &cli.out {
        Some(path) => std::fs::write(path, &out.report)?,
        None => std::io::stdout().lock().write_all(out.report.as_bytes())?,
    }
    Ok(out.code)
}
