//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in a computation.
///
/// Numerical routines distinguish between inputs that are outside the domain
/// of a formula ([`Error::InvalidInput`]), integrals that are genuinely
/// infinite ([`Error::Divergent`]) and integrals the adaptive scheme failed to
/// resolve to the requested accuracy ([`Error::NoConverge`]). The last variant
/// carries the partial value so a caller can still inspect what was computed.
#[derive(Debug, Error)]
pub enum Error {
    /// Parameter validation failed before any numerics ran.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested quantity is provably infinite for these parameters.
    #[error("divergent: {0}")]
    Divergent(String),

    /// An iteration or adaptive subdivision hit its budget without reaching
    /// the requested tolerance. `partial` is the best value found (real and
    /// imaginary part) and `error_estimate` the last error bound.
    #[error("no convergence in {context}: partial={partial:?}, err={error_estimate:.3e}")]
    NoConverge {
        context: String,
        partial: (f64, f64),
        error_estimate: f64,
    },

    /// Underlying I/O failure while writing campaign artifacts.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// CSV serialization failure.
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    /// JSON serialization failure.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Shorthand used by validators.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// The partial value of a [`Error::NoConverge`], if that is what this is.
    pub fn partial_value(&self) -> Option<(f64, f64)> {
        match self {
            Error::NoConverge { partial, .. } => Some(*partial),
            _ => None,
        }
    }
}
