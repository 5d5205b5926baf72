//! Crate-wide error type.

use thiserror::Error;

use crate::separation::SeparationResult;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix or operator dimensions do not line up for the requested operation.
    #[error("shape mismatch: {context}")]
    ShapeMismatch { context: String },

    /// A matrix that must be Hermitian deviates from its conjugate transpose.
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    /// An operator fails the density-operator invariants.
    #[error("not a density operator: {context}")]
    NotDensity { context: String },

    /// Kraus operators do not sum to the identity under K†K.
    #[error("channel is not trace preserving (deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    /// A separator exceeds the unit operator-norm ball beyond tolerance.
    #[error("operator norm {norm} exceeds 1 beyond tolerance")]
    NormTooLarge { norm: f64 },

    /// The Jacobi eigensolver failed to drive the off-diagonal mass below
    /// threshold within the sweep cap.
    #[error("eigensolver did not converge (off-diagonal mass {off_diagonal:.3e} after {sweeps} sweeps)")]
    EigNoConvergence { off_diagonal: f64, sweeps: usize },

    /// The saddle-point solver stopped at the iteration cap with the duality
    /// gap still above tolerance. The partial result is attached.
    #[error("solver did not converge: gap {gap:.3e} after {iterations} iterations", gap = .0.gap, iterations = .0.iterations)]
    NoConvergence(Box<SeparationResult>),

    /// A tensor-power construction would exceed the explicit size budget.
    #[error("operator of dimension {dim}^{k} exceeds the size budget {budget}")]
    TooLarge { dim: usize, k: usize, budget: usize },

    /// A generator or constructor received an out-of-range parameter.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// A numerical consistency certificate failed after a solve.
    #[error("certification failed: {0}")]
    CertificationFailed(String),

    /// An instance or report file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn shape(context: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            context: context.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
