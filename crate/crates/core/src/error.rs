use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("operation requires a non-principal character")]
    PrincipalCharacter,

    #[error("enumeration budget exceeded: {needed} tuple visits > cap {cap}")]
    BudgetExceeded { needed: u128, cap: u128 },

    #[error("config rejected: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the caller's parameters rather than the environment.
    pub fn is_rejected_input(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::Serialize(_))
    }
}
