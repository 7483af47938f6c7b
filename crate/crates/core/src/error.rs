use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter failed validation; the first field names the offender.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge for {quantity}: value {value:e}, error estimate {error_estimate:e}")]
    NonConvergence {
        quantity: &'static str,
        value: f64,
        error_estimate: f64,
    },

    /// The target energy is outside the range reachable by thermal states.
    #[error("no bracket for energy {target:e}: thermal energies span [{ground:e}, {high_temperature:e}]")]
    NoBracket {
        target: f64,
        ground: f64,
        high_temperature: f64,
    },

    /// A reduced density matrix has a negative eigenvalue beyond tolerance.
    #[error("non-physical two-site state: minimum eigenvalue {min_eigenvalue:e}")]
    NonPhysical { min_eigenvalue: f64 },

    #[error("I/O error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
