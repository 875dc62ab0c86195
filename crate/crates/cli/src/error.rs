use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// Where a parameter value came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Origin {
    Flag,
    File { path: PathBuf, line: usize },
    Default,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Flag => f.write_str("command line"),
            Origin::File { path, line } => write!(f, "{}:{line}", path.display()),
            Origin::Default => f.write_str("default"),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown flag: {0}")]
    UnknownFlag(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("invalid value for `{name}` ({origin}): {reason}")]
    InvalidValue {
        name: String,
        reason: String,
        origin: Origin,
    },

    #[error("missing required parameter `--{0}`")]
    MissingParameter(&'static str),

    #[error("config file {path}: {message}")]
    ConfigFile { path: PathBuf, message: String },

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Model(#[from] bcgc::Error),

    #[error("{failed} of {total} validation checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    /// Short category tag printed in front of the message.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::UnknownFlag(_) => "unknown-flag",
            CliError::Usage(_) => "usage",
            CliError::InvalidValue { .. } => "invalid-value",
            CliError::MissingParameter(_) => "missing-parameter",
            CliError::ConfigFile { .. } => "config",
            CliError::Io { .. } => "io",
            CliError::Model(_) => "model",
            CliError::ChecksFailed { .. } => "validation",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownFlag(_)
            | CliError::Usage(_)
            | CliError::InvalidValue { .. }
            | CliError::MissingParameter(_)
            | CliError::ConfigFile { .. } => 2,
            CliError::Io { .. } => 3,
            CliError::Model(_) => 4,
            CliError::ChecksFailed { .. } => 1,
        }
    }
}
