//! Command-line front end for the `ces-interp` library.
//!
//! Exit codes: 0 success, 1 a verified inequality failed, 2 usage or
//! input error.

pub mod commands;
pub mod funcfile;
pub mod names;

use std::fmt;

pub use commands::{run, Cli};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(ces_interp::Error),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ces_interp::Error> for CliError {
    fn from(e: ces_interp::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Usage(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("json: {e}"))
    }
}
