use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{failed} verification check(s) failed")]
    Verification { failed: usize },
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Verification { .. } => 2,
            CliError::Io { .. } => 3,
        }
    }
}

impl From<spinmzi::Error> for CliError {
    fn from(e: spinmzi::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
