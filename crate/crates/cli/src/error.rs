use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}, field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },

    #[error("invalid system: {0}")]
    System(#[source] lti_pmp::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("analysis failed: {0}")]
    Analysis(#[from] lti_pmp::Error),
}

impl CliError {
    pub fn parse(line: usize, field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Parse {
            line,
            field: field.into(),
            message: message.into(),
        }
    }

    /// Exit status for an error that stopped a command before it reached a verdict.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Analysis(_) => crate::EXIT_INCONCLUSIVE,
            _ => crate::EXIT_IO,
        }
    }
}
