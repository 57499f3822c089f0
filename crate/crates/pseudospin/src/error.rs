use thiserror::Error;

/// Errors reported by numerical routines in this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter is outside the domain of the routine.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested value is too large in magnitude for f64. Callers should
    /// switch to a scaled variant of the routine when one exists.
    #[error("overflow: {0}")]
    Overflow(String),

    /// Adaptive quadrature hit its subdivision limit before reaching the
    /// requested tolerance.
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    /// A lattice sum needed more terms than the truncation policy allows.
    #[error("lattice truncation did not converge: {0}")]
    TruncationNotConverged(String),
}

pub type Result<T> = std::result::Result<T, Error>;
