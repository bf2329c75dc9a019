use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical or modal parameter violates its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Zero net-inductance: the dimensionless electric stiffness is undefined.
    #[error("resistive-only network unsupported in dimensionless form (net_inductance = 0)")]
    ResistiveOnlyNetwork,

    /// Malformed configuration text.
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    /// Inconsistent vector/matrix dimensions between modules.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A solver or integrator failed to reach its accuracy contract.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn config(line: usize, message: impl Into<String>) -> Self {
        Error::Config {
            line,
            message: message.into(),
        }
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
