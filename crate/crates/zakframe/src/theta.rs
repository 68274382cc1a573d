//! Jacobi theta functions for real nome q in (0, 1).
//!
//! The four classical series, for z complex:
//!
//! ```text
//! theta1(z;q) = (1/i) sum_n (-1)^n q^((n+1/2)^2) e^((2n+1)iz)
//! theta2(z;q) =       sum_n        q^((n+1/2)^2) e^((2n+1)iz)
//! theta3(z;q) =       sum_n        q^(n^2)       e^(2niz)
//! theta4(z;q) =       sum_n (-1)^n q^(n^2)       e^(2niz)
//! ```
//!
//! Evaluation is by the truncated symmetric series: terms are paired over
//! +-n and accumulated from the largest |n| down to the center, which keeps
//! the summation order fixed (bitwise-deterministic results) and reduces
//! cancellation near the minima of theta4.
//!
//! Truncation order: the nome carries `n_max`, the smallest order with
//! q^(n_max^2) below `REL_EPS`. For complex arguments the summand peaks near
//! n = |Im z| / ln(1/q), so the effective order is shifted by that amount.
//!
//! Admissible strip: for complex z the evaluator requires
//! q^k * e^(2|Im z|) < 0.9 with k = 1 for theta3/theta4 and k = 2 for
//! theta1/theta2 (the consecutive-term ratio in the respective tails), so the
//! truncated tail stays geometric. Outside the strip the evaluator returns
//! [`Error::ArgumentOutOfStrip`] instead of silently losing accuracy; callers
//! that need |Im z| up to pi*gamma/2 and beyond go through the quasi-period
//! shift identities (see `theta3_reduced`). Purely real arguments converge
//! for every q in (0, 1) and skip the strip check.
//!
//! Values at z = 0 with q above the self-dual point e^(-pi) are computed
//! through the dual nome q' = e^(pi^2 / ln q): the direct alternating series
//! for theta4(0;q) loses all relative accuracy as q -> 1 (the sum is
//! exponentially smaller than its terms), while the dual series is
//! positive-dominant and accurate to machine precision.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Series truncation threshold (binary64 unit-roundoff scale).
pub const REL_EPS: f64 = 1e-16;

/// Safety margin for the convergence-strip test.
const STRIP_MARGIN: f64 = 0.9;

/// Nome above which zero-argument values switch to the dual-nome series.
/// e^(-pi) is the self-dual point, where both routes coincide.
const SELF_DUAL_Q: f64 = 0.04321391826377225;

/// Which of the four theta functions to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaKind {
    Theta1,
    Theta2,
    Theta3,
    Theta4,
}

impl ThetaKind {
    fn name(self) -> &'static str {
        match self {
            ThetaKind::Theta1 => "theta1",
            ThetaKind::Theta2 => "theta2",
            ThetaKind::Theta3 => "theta3",
            ThetaKind::Theta4 => "theta4",
        }
    }
}

/// A validated nome q in (0, 1) together with its derived truncation order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaNome {
    q: f64,
    n_max: usize,
}

impl ThetaNome {
    /// Validate q and derive the truncation order
    /// `n_max = ceil(sqrt(ln REL_EPS / ln q)) + 2`, the smallest order whose
    /// pure-decay tail q^(n^2) is below `REL_EPS`.
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() || q <= 0.0 || q >= 1.0 {
            return Err(Error::NomeOutOfRange(q));
        }
        Ok(Self { q, n_max: order_for_ln_q(q.ln()) })
    }

    /// Nome q = e^(-pi*gamma) for a positive scale parameter.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidGamma(gamma));
        }
        Self::new((-PI * gamma).exp())
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// ln(1/q) > 0; equals pi*gamma when q = e^(-pi*gamma).
    fn log_inv_q(&self) -> f64 {
        -self.q.ln()
    }

    /// Extra summation orders so the summand peak at n ~ |Im z|/ln(1/q) is
    /// passed before the pure-decay tail bound applies.
    fn order_for_im(&self, im_abs: f64) -> usize {
        self.n_max + (im_abs / self.log_inv_q()).ceil() as usize
    }
}

/// Strip admissibility for complex arguments: q^k e^(2|Im z|) < margin, with
/// k the exponent gap of the series tail (1 for integer-order, 2 for
/// half-integer-order kinds).
fn strip_ok(kind: ThetaKind, q: f64, im_abs: f64) -> bool {
    let k = match kind {
        ThetaKind::Theta1 | ThetaKind::Theta2 => 2,
        ThetaKind::Theta3 | ThetaKind::Theta4 => 1,
    };
    q.powi(k) * (2.0 * im_abs).exp() < STRIP_MARGIN
}

/// Evaluate a theta function by the truncated symmetric series.
///
/// Errors with [`Error::NomeOutOfRange`] via nome construction and with
/// [`Error::ArgumentOutOfStrip`] when a complex argument leaves the
/// admissible strip documented in the module header.
pub fn theta_eval(kind: ThetaKind, z: Complex64, nome: &ThetaNome) -> Result<Complex64> {
    let im_abs = z.im.abs();
    if im_abs == 0.0 {
        if z.re == 0.0 {
            return Ok(Complex64::new(theta_zero(kind, nome), 0.0));
        }
        return Ok(theta_series(kind, z, nome.q, nome.n_max));
    }
    if !strip_ok(kind, nome.q, im_abs) {
        return Err(Error::ArgumentOutOfStrip { q: nome.q, im: im_abs });
    }
    Ok(theta_series(kind, z, nome.q, nome.order_for_im(im_abs)))
}

/// The raw truncated symmetric series, paired over +-n, accumulated from the
/// largest |n| inward.
fn theta_series(kind: ThetaKind, z: Complex64, q: f64, order: usize) -> Complex64 {
    let ln_q = q.ln();
    let mut acc = Complex64::new(0.0, 0.0);
    match kind {
        ThetaKind::Theta3 | ThetaKind::Theta4 => {
            let alternating = kind == ThetaKind::Theta4;
            for n in (1..=order).rev() {
                let w = ((n * n) as f64 * ln_q).exp();
                if w == 0.0 {
                    continue;
                }
                let c = (2.0 * n as f64 * z).cos();
                let sign = if alternating && n % 2 == 1 { -1.0 } else { 1.0 };
                acc += 2.0 * sign * w * c;
            }
            acc += 1.0;
        }
        ThetaKind::Theta2 | ThetaKind::Theta1 => {
            // Pairs (n, -n-1) share the weight q^((n+1/2)^2).
            let odd = kind == ThetaKind::Theta1;
            for n in (0..=order).rev() {
                let half = n as f64 + 0.5;
                let w = (half * half * ln_q).exp();
                if w == 0.0 {
                    continue;
                }
                let m = (2 * n + 1) as f64;
                let sign = if odd && n % 2 == 1 { -1.0 } else { 1.0 };
                if odd {
                    acc += 2.0 * sign * w * (m * z).sin();
                } else {
                    acc += 2.0 * sign * w * (m * z).cos();
                }
            }
        }
    }
    acc
}

/// Truncation order for a nome given as ln q (usable even when the nome
/// itself underflows).
fn order_for_ln_q(ln_q: f64) -> usize {
    ((REL_EPS.ln() / ln_q).sqrt().ceil() as usize + 2).max(1)
}

/// Zero-argument value, routed through the dual nome when q is large.
///
/// Dual route: with q = e^(-pi*gamma) and q' = e^(-pi/gamma),
/// theta2(0;q) = theta4(0;q')/sqrt(gamma), theta3(0;q) = theta3(0;q')/sqrt(gamma),
/// theta4(0;q) = theta2(0;q')/sqrt(gamma). The dual series works on ln q'
/// directly, so nomes arbitrarily close to 1 stay finite (values whose true
/// size is below the binary64 range underflow to zero).
fn theta_zero(kind: ThetaKind, nome: &ThetaNome) -> f64 {
    if kind == ThetaKind::Theta1 {
        return 0.0;
    }
    if nome.q <= SELF_DUAL_Q {
        return theta_zero_direct(kind, nome.q.ln(), nome.n_max);
    }
    let gamma = nome.log_inv_q() / PI;
    let ln_q_dual = -PI / gamma;
    let dual_kind = match kind {
        ThetaKind::Theta2 => ThetaKind::Theta4,
        ThetaKind::Theta3 => ThetaKind::Theta3,
        ThetaKind::Theta4 => ThetaKind::Theta2,
        ThetaKind::Theta1 => unreachable!(),
    };
    theta_zero_direct(dual_kind, ln_q_dual, order_for_ln_q(ln_q_dual)) / gamma.sqrt()
}

fn theta_zero_direct(kind: ThetaKind, ln_q: f64, order: usize) -> f64 {
    let mut acc = 0.0;
    match kind {
        ThetaKind::Theta3 | ThetaKind::Theta4 => {
            let alternating = kind == ThetaKind::Theta4;
            for n in (1..=order).rev() {
                let w = ((n * n) as f64 * ln_q).exp();
                let sign = if alternating && n % 2 == 1 { -1.0 } else { 1.0 };
                acc += 2.0 * sign * w;
            }
            acc += 1.0;
        }
        ThetaKind::Theta2 => {
            for n in (0..=order).rev() {
                let half = n as f64 + 0.5;
                acc += 2.0 * (half * half * ln_q).exp();
            }
        }
        ThetaKind::Theta1 => {}
    }
    acc
}

/// theta1'(0;q) by termwise differentiation:
/// `2 sum_{n>=0} (-1)^n (2n+1) q^((n+1/2)^2)`, positive (it underflows to
/// zero only when q is so close to 1 that the true value is below the
/// binary64 range).
///
/// For q above the self-dual point the series is evaluated at the dual nome
/// using theta1'(0; e^(-pi*gamma)) = gamma^(-3/2) theta1'(0; e^(-pi/gamma)).
pub fn theta1_prime0(nome: &ThetaNome) -> Result<f64> {
    if nome.q <= SELF_DUAL_Q {
        return Ok(theta1_prime0_direct(nome.q.ln(), nome.n_max));
    }
    let gamma = nome.log_inv_q() / PI;
    let ln_q_dual = -PI / gamma;
    Ok(theta1_prime0_direct(ln_q_dual, order_for_ln_q(ln_q_dual)) / (gamma * gamma.sqrt()))
}

fn theta1_prime0_direct(ln_q: f64, order: usize) -> f64 {
    let mut acc = 0.0;
    for n in (0..=order).rev() {
        let half = n as f64 + 0.5;
        let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
        acc += 2.0 * sign * (2 * n + 1) as f64 * (half * half * ln_q).exp();
    }
    acc
}

/// Both sides of the modular relation
/// `theta3(pi*i*(1/2 - t)*gamma; e^(-pi*gamma))
///  = gamma^(-1/2) exp(pi*gamma*(1/2 - t)^2) theta3(pi*(1/2 - t); e^(-pi/gamma))`,
/// evaluated independently, as a self-test primitive.
#[derive(Debug, Clone, Copy)]
pub struct ModularCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
}

impl ModularCheck {
    pub fn abs_diff(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }

    pub fn rel_diff(&self) -> f64 {
        self.abs_diff() / self.lhs.norm().max(f64::MIN_POSITIVE)
    }
}

/// Evaluate the modular relation at scale `gamma` and offset `t`.
///
/// The left side has a purely imaginary argument of size up to pi*gamma/2
/// and is evaluated through the shift-reduced theta3 path; the right side is
/// a real-argument series at the dual nome.
pub fn theta3_modular(gamma: f64, t: f64) -> Result<ModularCheck> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::InvalidGamma(gamma));
    }
    let s = 0.5 - t;
    let lhs = theta3_reduced(Complex64::new(0.0, PI * gamma * s), gamma)?;
    let dual = ThetaNome::from_gamma(1.0 / gamma)?;
    let th3 = theta_eval(ThetaKind::Theta3, Complex64::new(PI * s, 0.0), &dual)?;
    let rhs = (PI * gamma * s * s).exp() / gamma.sqrt() * th3;
    Ok(ModularCheck { lhs, rhs })
}

/// theta(z + pi*i*gamma) for theta3/theta4 via the quasi-period shift
/// identities (q = e^(-pi*gamma) taken from the nome):
///
/// ```text
/// theta3(z + pi*i*gamma) =  e^(pi*gamma) e^(-2iz) theta3(z)
/// theta4(z + pi*i*gamma) = -e^(pi*gamma) e^(-2iz) theta4(z)
/// ```
///
/// The prefactor is evaluated as a single complex exponential so that large
/// shifts produce large-but-finite values instead of overflow artifacts.
pub fn theta_quasi_period_shift(
    kind: ThetaKind,
    z: Complex64,
    nome: &ThetaNome,
) -> Result<Complex64> {
    let sign = match kind {
        ThetaKind::Theta3 => 1.0,
        ThetaKind::Theta4 => -1.0,
        other => return Err(Error::UnsupportedKind(other.name())),
    };
    let pi_gamma = nome.log_inv_q();
    let base = theta_eval(kind, z, nome)?;
    let prefactor = (Complex64::new(pi_gamma, 0.0) - 2.0 * Complex64::i() * z).exp();
    Ok(sign * prefactor * base)
}

/// theta3 for arguments with |Im z| possibly at or beyond the strip bound,
/// reduced by quasi-period shifts.
///
/// Full periods pi*gamma are removed first; a residual |Im z| near
/// pi*gamma/2 is handled through the half-shift to theta2,
///
/// ```text
/// theta3(z) = q^(-1/4) e^( iw) theta2(w),  w = z + pi*i*gamma/2   (Im z < 0)
/// theta3(z) = q^(-1/4) e^(-iw) theta2(w),  w = z - pi*i*gamma/2   (Im z > 0)
/// ```
///
/// whose theta2 argument sits well inside the strip. Used by the Zak
/// closed-form evaluators, which need Im z up to pi*gamma/2 at the cell edge.
pub(crate) fn theta3_reduced(z: Complex64, gamma: f64) -> Result<Complex64> {
    let nome = ThetaNome::from_gamma(gamma)?;
    let pi_gamma = PI * gamma;

    // Remove whole quasi-periods: theta3(w + k*pi*i*gamma) = e^(k^2 pi gamma) e^(-2kiw) theta3(w).
    let k = (z.im / pi_gamma).round();
    if k * k * pi_gamma > 600.0 {
        return Err(Error::ArgumentOutOfStrip { q: nome.q(), im: z.im.abs() });
    }
    let w = z - Complex64::new(0.0, k * pi_gamma);
    let fold = if k == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        (Complex64::new(k * k * pi_gamma, 0.0) - 2.0 * k * Complex64::i() * w).exp()
    };

    if strip_ok(ThetaKind::Theta3, nome.q(), w.im.abs()) {
        return Ok(fold * theta_eval(ThetaKind::Theta3, w, &nome)?);
    }

    // Residual band near |Im w| = pi*gamma/2: half-shift to theta2.
    let sign = if w.im < 0.0 { 1.0 } else { -1.0 };
    let u = w + Complex64::new(0.0, sign * 0.5 * pi_gamma);
    let th2 = theta_eval(ThetaKind::Theta2, u, &nome)?;
    let prefactor = (Complex64::new(0.25 * pi_gamma, 0.0) + sign * Complex64::i() * u).exp();
    Ok(fold * prefactor * th2)
}
