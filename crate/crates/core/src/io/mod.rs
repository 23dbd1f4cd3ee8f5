//! Configuration, fixtures, output formatting and the command-line front end.

pub mod cli;
pub mod config;
pub mod fixtures;
pub mod format;

use thiserror::Error;

pub use cli::{run, Cli, CliError, CommandOutput};
pub use config::{RawConfig, RunConfig};
pub use format::{sig9, CsvTable};

/// Problems with the configuration or input files (exit code 2).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },

    #[error("{origin}{}: {}{message}", line.map(|l| format!(" line {l}")).unwrap_or_default(), if path.is_empty() || path == "." { String::new() } else { format!("field `{path}`: ") })]
    Parse {
        origin: String,
        path: String,
        line: Option<usize>,
        message: String,
    },

    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}
