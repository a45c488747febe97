//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Geometry that cannot describe a hovering transmitter (negative or
    /// zero altitude, non-finite coordinates).
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// A value outside its documented domain (probabilities, layer counts,
    /// deadline constraints and the like).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Received payloads contradict the recorded coefficient vectors.
    #[error("inconsistent linear system: payloads contradict coefficients")]
    InconsistentSystem,

    /// Exact enumeration was asked for an instance with more erasure cells
    /// than it can exhaust.
    #[error("instance too large for exact enumeration: {cells} erasure cells (limit {limit})")]
    InstanceTooLarge { cells: usize, limit: usize },

    /// No position satisfies the fairness constraint.
    #[error("infeasible problem: {0}")]
    Infeasible(String),

    /// Configuration file could not be parsed or failed validation.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
