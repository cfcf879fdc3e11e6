//! Batch front-end for the `hkle` pipeline.
//!
//! Each subcommand resolves a [`RunConfig`], runs the pipeline once per
//! correlation length in `kernel.d`, and writes CSV files into `output.dir`.
//! Every CSV starts with a `#` comment line echoing the resolved
//! configuration, followed by a header row.

pub mod commands;
pub mod config;
mod output;

use std::fmt;

pub use commands::{run, Command};
pub use config::RunConfig;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// Bad configuration, arguments or input files.
    pub const CONFIG: i32 = 2;
    /// A numerical stage failed.
    pub const NUMERICAL: i32 = 3;
    /// A size or node budget was exceeded.
    pub const BUDGET: i32 = 4;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            code: exit::CONFIG,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<hkle::Error> for CliError {
    fn from(e: hkle::Error) -> Self {
        use hkle::Error::*;
        let code = match &e {
            Format { .. } | Tagging { .. } | Geometry(_) | Dimension { .. } | Config(_) | Io(_) => exit::CONFIG,
            NeedMoreEigenpairs { .. } | Solver(_) | AllRejected(_) | Assembly(_) => exit::NUMERICAL,
            Budget(_) | NotComputable(_) => exit::BUDGET,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::config(format!("io: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::config(format!("csv: {e}"))
    }
}
