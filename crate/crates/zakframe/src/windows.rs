//! Analytic window families, dilation, and rational lattice parameters.
//!
//! Two unit-norm windows with scale gamma > 0:
//!
//! ```text
//! gaussian:          g(t) = (2 gamma)^(1/4) e^(-pi gamma t^2)
//! hyperbolic secant: g(t) = (pi gamma / 2)^(1/2) / cosh(pi gamma t)
//! ```
//!
//! Both families are closed under the dilation (D_c f)(t) = c^(1/2) f(c t):
//! the secant maps gamma -> gamma*c and the Gaussian maps gamma -> gamma*c^2,
//! which is what lets a lattice (a, b) be reduced exactly to (a*b, 1).
//!
//! Lattice constants are kept as exact rationals so the frame/not-frame
//! dichotomy at a*b = 1 never depends on floating-point rounding.

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Argument size beyond which sech underflows to a negligible value;
/// returning 0 there keeps matrix assembly free of Inf/NaN.
const SECH_CUTOFF: f64 = 350.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WindowKind {
    Gaussian,
    HyperbolicSecant,
}

/// A closed-form window, normalized to unit L2 norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    kind: WindowKind,
    gamma: f64,
}

impl WindowSpec {
    pub fn new(kind: WindowKind, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidGamma(gamma));
        }
        Ok(Self { kind, gamma })
    }

    pub fn gaussian(gamma: f64) -> Result<Self> {
        Self::new(WindowKind::Gaussian, gamma)
    }

    pub fn hyperbolic_secant(gamma: f64) -> Result<Self> {
        Self::new(WindowKind::HyperbolicSecant, gamma)
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Pointwise evaluation. Strictly positive and even.
    pub fn eval(&self, t: f64) -> f64 {
        let x = PI * self.gamma * t;
        match self.kind {
            WindowKind::Gaussian => (2.0 * self.gamma).powf(0.25) * (-x * t).exp(),
            WindowKind::HyperbolicSecant => {
                if x.abs() > SECH_CUTOFF {
                    return 0.0;
                }
                (PI * self.gamma / 2.0).sqrt() / x.cosh()
            }
        }
    }

    /// The dilated window D_c g as a member of the same family.
    pub fn dilate(&self, c: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::NonpositiveDilation(c));
        }
        let gamma = match self.kind {
            WindowKind::Gaussian => self.gamma * c * c,
            WindowKind::HyperbolicSecant => self.gamma * c,
        };
        Self::new(self.kind, gamma)
    }

    /// Distance beyond which |g(t)|/g(0) stays below `tol`.
    pub fn decay_radius(&self, tol: f64) -> f64 {
        let l = (2.0 / tol).ln();
        match self.kind {
            // e^(-pi gamma d^2) < tol
            WindowKind::Gaussian => ((1.0 / tol).ln() / (PI * self.gamma)).sqrt(),
            // 1/cosh <= 2 e^(-pi gamma d) < tol
            WindowKind::HyperbolicSecant => l / (PI * self.gamma),
        }
    }

    /// Upper bound on the tail sum `sum_{|l| >= dist} g(l)` of integer-shifted
    /// window values, from the exponential (or faster) decay.
    pub fn tail_bound(&self, dist: f64) -> f64 {
        if dist <= 0.0 {
            return f64::INFINITY;
        }
        let peak = self.eval(0.0);
        match self.kind {
            WindowKind::Gaussian => {
                // ratio between consecutive terms at distance d is e^(-pi gamma (2d+1))
                let r = (-PI * self.gamma * (2.0 * dist + 1.0)).exp();
                2.0 * peak * (-PI * self.gamma * dist * dist).exp() / (1.0 - r)
            }
            WindowKind::HyperbolicSecant => {
                let r = (-PI * self.gamma).exp();
                2.0 * peak * 2.0 * (-PI * self.gamma * dist).exp() / (1.0 - r)
            }
        }
    }
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            WindowKind::Gaussian => write!(f, "gaussian(gamma={})", self.gamma),
            WindowKind::HyperbolicSecant => write!(f, "sech(gamma={})", self.gamma),
        }
    }
}

/// Rational lattice constants a, b stored as coprime integer pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeParams {
    a: Rational64,
    b: Rational64,
}

impl LatticeParams {
    pub fn new(a: Rational64, b: Rational64) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::InvalidLattice { name: "a", value: a.to_string() });
        }
        if !b.is_positive() {
            return Err(Error::InvalidLattice { name: "b", value: b.to_string() });
        }
        Ok(Self { a, b })
    }

    pub fn from_integers(a_num: i64, a_den: i64, b_num: i64, b_den: i64) -> Result<Self> {
        if a_den == 0 || b_den == 0 {
            return Err(Error::InvalidLattice { name: "denominator", value: "0".into() });
        }
        Self::new(Rational64::new(a_num, a_den), Rational64::new(b_num, b_den))
    }

    pub fn a(&self) -> Rational64 {
        self.a
    }

    pub fn b(&self) -> Rational64 {
        self.b
    }

    pub fn a_f64(&self) -> f64 {
        self.a.to_f64().unwrap()
    }

    pub fn b_f64(&self) -> f64 {
        self.b.to_f64().unwrap()
    }

    /// Exact lattice density a*b.
    pub fn density(&self) -> Rational64 {
        self.a * self.b
    }

    /// Exact test a*b < 1.
    pub fn is_undersampled(&self) -> bool {
        self.density() < Rational64::from_integer(1)
    }

    /// Exact test a*b == 1.
    pub fn is_critical(&self) -> bool {
        self.density() == Rational64::from_integer(1)
    }

    pub fn has_unit_b(&self) -> bool {
        self.b == Rational64::from_integer(1)
    }
}

impl fmt::Display for LatticeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(a={}, b={})", self.a, self.b)
    }
}

/// Reduce a lattice to b = 1: (g, a, b) is a frame iff (D_b g, a*b, 1) is,
/// and both window families are closed under dilation.
pub fn reduce_lattice(w: &WindowSpec, lat: &LatticeParams) -> Result<(WindowSpec, LatticeParams)> {
    if lat.has_unit_b() {
        return Ok((*w, *lat));
    }
    let reduced = w.dilate(lat.b_f64())?;
    let lat_reduced = LatticeParams::new(lat.density(), Rational64::from_integer(1))?;
    Ok((reduced, lat_reduced))
}
