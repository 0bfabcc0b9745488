use thiserror::Error;

/// Errors surfaced by the estimation and testing routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument or precondition violation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A matrix or variance that must be positive definite is numerically singular.
    #[error("singularity: {0}")]
    Singular(String),

    /// An iterative solver hit its iteration cap before meeting tolerance.
    #[error("failed to converge after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    /// Residual degrees of freedom exhausted (n <= support size).
    #[error("degrees of freedom error: {0}")]
    DegreesOfFreedom(String),

    /// Fewer observations than the procedure requires.
    #[error("too few observations: need at least {need}, got {got}")]
    TooFewObservations { need: usize, got: usize },

    /// Eigenvalue-ratio criterion found no meaningful factor structure.
    #[error("no factor structure detected: all eigenvalue ratios are degenerate")]
    NoFactor,
}

pub type Result<T> = std::result::Result<T, Error>;
