//! Library side of the `rcalab` command: run configuration, the verification
//! pipeline, JSON reports and the single-purpose subcommands.

pub mod commands;
pub mod config;
pub mod pipeline;
pub mod report;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error(transparent)]
    Core(#[from] rcalab_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for configuration and input problems, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ConfigInvalid(_) | CliError::Io { .. } => 2,
            CliError::Core(rcalab_core::Error::Parse { .. }) => 2,
            CliError::Core(_) => 1,
        }
    }
}
