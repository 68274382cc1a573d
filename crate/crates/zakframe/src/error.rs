//! Error type shared by all computation modules.

use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Theta-series nome must lie strictly inside (0, 1).
    #[error("nome q = {0} is outside (0, 1)")]
    NomeOutOfRange(f64),

    /// Complex argument lies outside the admissible convergence strip of the
    /// theta series for the given nome.
    #[error("argument with |Im z| = {im:.6} outside admissible strip for q = {q:.6}")]
    ArgumentOutOfStrip { q: f64, im: f64 },

    /// Operation defined only for a subset of the theta kinds.
    #[error("theta kind {0} is not supported by this operation")]
    UnsupportedKind(&'static str),

    /// Window scale parameter must be positive and finite.
    #[error("scale parameter gamma = {0} must be positive and finite")]
    InvalidGamma(f64),

    /// Dilation factor must be positive.
    #[error("dilation factor c = {0} must be positive")]
    NonpositiveDilation(f64),

    /// Lattice constants must be positive rationals.
    #[error("lattice constant {name} = {value} must be positive")]
    InvalidLattice { name: &'static str, value: String },

    /// The requested operation needs ab < 1 (or ab <= 1) and the lattice violates it.
    #[error("lattice density ab = {0} violates the required bound")]
    DensityTooHigh(String),

    /// A series or matrix truncation is too small for the requested accuracy.
    #[error("truncation too small: {context} (tail bound {bound:.3e})")]
    TruncationTooSmall { context: &'static str, bound: f64 },

    /// A lattice with b != 1 reached a layer that requires the reduced form.
    #[error("lattice not reduced to b = 1 (got b = {0})")]
    NotReduced(String),

    /// Eigenvalue computation failed to produce finite results.
    #[error("numerical failure: {0}")]
    NumericalFailure(&'static str),

    /// Denominator field too close to zero for a stable ratio.
    #[error("zero division: |denominator| = {0:.3e} below threshold")]
    ZeroDivision(f64),

    /// Evaluation point is inside the excluded neighborhood of a half-integer.
    #[error("t = {t} is within {eps} of a half-integer")]
    TooCloseToHalfInteger { t: f64, eps: f64 },

    /// Doubling the quadrature node count moved the result more than tolerated.
    #[error("quadrature not converged: relative shift {shift:.3e} at {n} nodes")]
    QuadratureNotConverged { n: usize, shift: f64 },

    /// Argument outside the operation's domain.
    #[error("domain error: {0}")]
    DomainError(String),

    /// Grid resolutions below the minimum for the operation.
    #[error("grid resolution {0} too small (minimum {1})")]
    GridTooSmall(usize, usize),

    /// Serialization failure.
    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
