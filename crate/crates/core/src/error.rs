//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A point or parameter fell outside a sampled/tabulated range.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// The profile integrator hit an invalid state (u <= 0 or non-finite).
    #[error("integration failure: {0}")]
    Integration(String),

    /// Induced metric lost positivity (graph too steep for the grid).
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),

    /// An iterative solve did not reach its tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e}): {context}")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        context: String,
    },

    /// A precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Bad experiment configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
