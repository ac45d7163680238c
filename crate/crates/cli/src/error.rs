use std::path::PathBuf;

use thiserror::Error;

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Well-formed input that violates a domain constraint.
pub const EXIT_VALIDATION: i32 = 1;
/// Input that could not be read or parsed.
pub const EXIT_PARSE: i32 = 2;
/// Bad flags or flag combinations.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] structinfo::Error),

    #[error("cannot read `{path}`: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write `{path}`: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: parse error at {location}: {reason}")]
    Parse {
        path: PathBuf,
        location: String,
        reason: String,
    },

    #[error("usage: {0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_parse() => EXIT_PARSE,
            CliError::Core(_) => EXIT_VALIDATION,
            CliError::Read { .. } | CliError::Parse { .. } => EXIT_PARSE,
            CliError::Write { .. } => EXIT_VALIDATION,
            CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
