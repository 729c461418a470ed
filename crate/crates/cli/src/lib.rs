//! File formats, table rendering and the command surface for the shift
//! detection toolkit. Everything numeric lives in `driftgauge-core`; this
//! crate owns paths, parsing and process exit codes.

pub mod commands;
pub mod io;
pub mod render;

use std::path::{Path, PathBuf};

use driftgauge_core::CoreError;

/// Process exit codes form a stable contract: 0 success (and no shift found),
/// 1 I/O, parse or precondition failures, 2 usage errors or insufficient
/// items, 3 shift detected.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SHIFT: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub fn format(path: impl AsRef<Path>, message: impl Into<String>) -> Self {
        CliError::Format {
            path: path.as_ref().to_path_buf(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_ERROR,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Parses the process arguments, runs the chosen command and returns the
/// process exit code. Errors are printed to standard error.
pub fn run_cli() -> i32 {
    let cli = <commands::Cli as clap::Parser>::parse();
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
