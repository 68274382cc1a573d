//! Numerical toolkit for Gabor frames built from Gaussian and hyperbolic-secant
//! windows.
//!
//! The library evaluates Jacobi theta functions, Zak transforms (direct series
//! and theta closed forms), verifies the Zak-domain factorization identity that
//! links the two windows, estimates Gabor frame bounds through the Ron-Shen
//! time-domain criterion, and computes the critical-density (a = b = 1)
//! canonical dual and tight windows together with their small- and large-scale
//! limits.
//!
//! Modules:
//! - [`theta`]: the four Jacobi theta series, the derivative at the origin,
//!   quasi-period shifts and the modular relation used for self-tests.
//! - [`windows`]: the two analytic window families, dilation, and rational
//!   lattice parameters with exact reduction to b = 1.
//! - [`zak`]: Zak transforms on points and grids, direct and closed-form.
//! - [`factorization`]: quantitative verification of the factorization
//!   identity and a generic rank-one separability test for Zak ratios.
//! - [`framebounds`]: truncated Ron-Shen matrices, eigenvalue extremes, frame
//!   bound estimation and the analytic lower bound for the secant window.
//! - [`critical`]: Zibulski-Zeevi scalars, dual windows (closed forms and
//!   quadrature), tight windows, and limit profiles.
//!
//! All routines are pure functions of their inputs; grid fills and per-point
//! profile evaluations are parallelized with deterministic output (identical
//! bytes for any thread count).

pub mod critical;
pub mod error;
pub mod factorization;
pub mod framebounds;
pub mod theta;
pub mod windows;
pub mod zak;

pub use error::{Error, Result};
pub use theta::{ThetaKind, ThetaNome};
pub use windows::{LatticeParams, WindowKind, WindowSpec};
pub use zak::{GridOffsets, ZakField, ZakMethod};

/// Format a float with 17 significant digits, enough for exact binary64
/// round-trip, locale-free.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
