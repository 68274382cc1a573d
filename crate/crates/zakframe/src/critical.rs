//! Critical-density (a = b = 1) objects: Zibulski-Zeevi scalars, canonical
//! dual windows, canonical tight windows, and the gamma-limits of the tight
//! family.
//!
//! At a = b = 1 the Zibulski-Zeevi matrices degenerate to the scalar
//! |Zg(t, nu)|^2, and the canonical dual and tight windows reduce to
//! nu-integrals over one period:
//!
//! ```text
//! g_dual(t)  = integral_0^1 dnu / (Zg)*(t, nu)
//! g_tight(t) = integral_0^1 Zg(t, nu) / |Zg(t, nu)| dnu
//! ```
//!
//! Both integrands are smooth 1-periodic functions of nu whenever t is not a
//! half-integer (the Zak transforms of the even windows vanish at
//! (1/2, 1/2) mod 1), so periodic-trapezoid quadrature converges spectrally;
//! the rate degrades as t approaches a half-integer, which is why every
//! operation here excludes a small neighborhood of those points and verifies
//! convergence by doubling the node count. No regularization is attempted
//! near the excluded set: the dual formulas are only formal there.
//!
//! Closed forms at gamma = 1 (all theta functions at nome e^(-pi)):
//!
//! ```text
//! g_dual_sech(t + n) = 2^(1/2) (-1)^n theta4^2(pi t) e^(2 pi t^2 + 2 pi n t)
//!                      / (pi^(1/2) theta1'(0)^2 cosh(pi (t + n)))
//! g_dual_gauss(t)    = 2^(3/4) / theta1'(0) * e^(pi t^2)
//!                      * sum_{n - 1/2 > |t|} (-1)^(n-1) e^(-pi (n - 1/2)^2)
//! ```
//!
//! The exponentials are combined before exponentiation, so the closed forms
//! stay finite for every admissible argument.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};
use crate::theta::{theta1_prime0, theta_eval, ThetaKind, ThetaNome};
use crate::windows::WindowSpec;
use crate::zak::zak_closed;

/// Default exclusion radius around half-integers.
pub const DEFAULT_EPS_HALF: f64 = 1e-3;

/// Default periodic-trapezoid node count.
pub const DEFAULT_N_QUAD: usize = 512;

/// Relative shift under node doubling accepted as converged.
const QUAD_TOL: f64 = 1e-8;

/// Node-count ceiling for the adaptive profile evaluations.
const MAX_N_QUAD: usize = 1 << 16;

/// Quadrature parameters shared by the dual/tight evaluations.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadParams {
    pub n_quad: usize,
    pub eps_half: f64,
}

impl Default for QuadParams {
    fn default() -> Self {
        Self { n_quad: DEFAULT_N_QUAD, eps_half: DEFAULT_EPS_HALF }
    }
}

/// Distance from t to the nearest half-integer.
pub fn half_integer_distance(t: f64) -> f64 {
    let frac = (t - 0.5).rem_euclid(1.0);
    frac.min(1.0 - frac)
}

fn check_admissible(t: f64, eps_half: f64) -> Result<()> {
    if half_integer_distance(t) < eps_half {
        return Err(Error::TooCloseToHalfInteger { t, eps: eps_half });
    }
    Ok(())
}

/// The Zibulski-Zeevi scalar |Zg(t, nu)|^2 at critical density.
pub fn zz_scalar(w: &WindowSpec, t: f64, nu: f64) -> Result<f64> {
    Ok(zak_closed(w, t, nu)?.norm_sqr())
}

/// A quadrature result with its reported imaginary residual.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadValue {
    pub value: f64,
    pub imag_residual: f64,
    pub n_quad: usize,
}

fn periodic_trapezoid<F>(f: F, n: usize) -> Result<num_complex::Complex64>
where
    F: Fn(f64) -> Result<num_complex::Complex64>,
{
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for k in 0..n {
        acc += f(k as f64 / n as f64)?;
    }
    Ok(acc / n as f64)
}

fn quad_with_doubling<F>(f: &F, n_quad: usize, adaptive: bool) -> Result<QuadValue>
where
    F: Fn(f64) -> Result<num_complex::Complex64>,
{
    let mut n = n_quad.max(64);
    let mut coarse = periodic_trapezoid(f, n)?;
    loop {
        let fine = periodic_trapezoid(f, 2 * n)?;
        // The profiles have unit natural scale (|g_tight| <= 1, duals O(1));
        // the floor keeps the test meaningful where the true value is ~0,
        // e.g. the tight window at nonzero integers.
        let shift = (coarse - fine).norm() / fine.norm().max(1.0);
        if shift <= QUAD_TOL {
            return Ok(QuadValue { value: fine.re, imag_residual: fine.im.abs(), n_quad: 2 * n });
        }
        if !adaptive || 2 * n >= MAX_N_QUAD {
            return Err(Error::QuadratureNotConverged { n: 2 * n, shift });
        }
        n *= 2;
        coarse = fine;
    }
}

/// Canonical dual window by quadrature: `integral_0^1 dnu / (Zg)*(t, nu)`.
///
/// Requires t at least `eps_half` away from every half-integer and at least
/// 64 nodes; fails with [`Error::QuadratureNotConverged`] when doubling the
/// node count still moves the result.
pub fn dual_numeric(w: &WindowSpec, t: f64, params: &QuadParams) -> Result<QuadValue> {
    check_admissible(t, params.eps_half)?;
    let f = |nu: f64| Ok(zak_closed(w, t, nu)?.conj().inv());
    quad_with_doubling(&f, params.n_quad, false)
}

fn dual_numeric_adaptive(w: &WindowSpec, t: f64, params: &QuadParams) -> Result<QuadValue> {
    check_admissible(t, params.eps_half)?;
    let f = |nu: f64| Ok(zak_closed(w, t, nu)?.conj().inv());
    quad_with_doubling(&f, params.n_quad, true)
}

/// ln cosh x without overflow.
fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (1.0 + (-2.0 * a).exp()).ln() - std::f64::consts::LN_2
}

/// Closed form of the secant dual at gamma = 1, parameterized by the
/// fractional part t in (-1/2, 1/2) and the integer offset n.
pub fn dual_sech_closed(t_frac: f64, n: i64) -> Result<f64> {
    if !t_frac.is_finite() || t_frac.abs() >= 0.5 - DEFAULT_EPS_HALF {
        return Err(Error::DomainError(format!(
            "t_frac = {t_frac} outside (-1/2 + eps, 1/2 - eps)"
        )));
    }
    let nome = ThetaNome::from_gamma(1.0)?;
    let th4 = theta_eval(ThetaKind::Theta4, num_complex::Complex64::new(PI * t_frac, 0.0), &nome)?.re;
    let th1p = theta1_prime0(&nome)?;
    let nf = n as f64;
    let log_factor = 2.0 * PI * t_frac * t_frac + 2.0 * PI * nf * t_frac - ln_cosh(PI * (t_frac + nf));
    let sign = if n.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    Ok(2.0f64.sqrt() * sign * th4 * th4 * log_factor.exp() / (PI.sqrt() * th1p * th1p))
}

/// Closed form of the Gaussian dual at gamma = 1: a step-truncated theta-like
/// series scaled by e^(pi t^2); constant between consecutive half-integers up
/// to that growth factor.
pub fn dual_gauss_series(t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::DomainError(format!("t = {t}")));
    }
    if half_integer_distance(t) < DEFAULT_EPS_HALF {
        return Err(Error::DomainError(format!("t = {t} too close to a half-integer")));
    }
    let nome = ThetaNome::from_gamma(1.0)?;
    let th1p = theta1_prime0(&nome)?;
    let abs_t = t.abs();
    let mut n = (abs_t + 0.5).floor() as i64 + 1;
    let mut acc = 0.0f64;
    // Combined exponent pi (t^2 - (n - 1/2)^2) < 0 on the whole summation range.
    loop {
        let half = n as f64 - 0.5;
        let term = (PI * (t * t - half * half)).exp();
        if term < 1e-18 * acc.abs().max(1.0) && half > abs_t + 1.0 {
            break;
        }
        let sign = if n.rem_euclid(2) == 1 { 1.0 } else { -1.0 };
        acc += sign * term;
        n += 1;
    }
    Ok(2.0f64.powf(0.75) / th1p * acc)
}

/// Canonical tight window by quadrature:
/// `integral_0^1 Zg(t, nu)/|Zg(t, nu)| dnu`, with |result| <= 1.
pub fn tight_window(w: &WindowSpec, t: f64, params: &QuadParams) -> Result<QuadValue> {
    check_admissible(t, params.eps_half)?;
    let f = |nu: f64| {
        let z = zak_closed(w, t, nu)?;
        let norm = z.norm();
        if norm == 0.0 {
            return Err(Error::ZeroDivision(0.0));
        }
        Ok(z / norm)
    };
    quad_with_doubling(&f, params.n_quad, false)
}

fn tight_window_adaptive(w: &WindowSpec, t: f64, params: &QuadParams) -> Result<QuadValue> {
    check_admissible(t, params.eps_half)?;
    let f = |nu: f64| {
        let z = zak_closed(w, t, nu)?;
        let norm = z.norm();
        if norm == 0.0 {
            return Err(Error::ZeroDivision(0.0));
        }
        Ok(z / norm)
    };
    quad_with_doubling(&f, params.n_quad, true)
}

/// Real samples of a profile on an admissible t-grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampledProfile {
    pub label: String,
    pub gamma: f64,
    pub eps_half: f64,
    pub n_quad: usize,
    pub t_values: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampledProfile {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "t,value")?;
        for (t, v) in self.t_values.iter().zip(&self.values) {
            writeln!(out, "{t:.16e},{v:.16e}")?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// 200 equispaced points on [-3, 3] minus half-integer exclusions: the grid
/// used by the tight-window comparisons.
pub fn standard_profile_grid() -> Vec<f64> {
    grid_with_exclusions(-3.0, 3.0, 200, DEFAULT_EPS_HALF)
}

/// Equispaced grid with points within `eps_half` of a half-integer dropped.
pub fn grid_with_exclusions(lo: f64, hi: f64, count: usize, eps_half: f64) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .filter(|&t| half_integer_distance(t) >= eps_half)
        .collect()
}

fn profile_values<F>(grid: &[f64], eval: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    grid.par_iter().map(|&t| eval(t)).collect()
}

/// Sample the canonical dual profile of `w` on a grid.
pub fn sample_dual_profile(w: &WindowSpec, grid: &[f64], params: &QuadParams) -> Result<SampledProfile> {
    let values = profile_values(grid, |t| Ok(dual_numeric_adaptive(w, t, params)?.value))?;
    Ok(SampledProfile {
        label: format!("dual {w}"),
        gamma: w.gamma(),
        eps_half: params.eps_half,
        n_quad: params.n_quad,
        t_values: grid.to_vec(),
        values,
    })
}

/// Sample the canonical tight profile of `w` on a grid.
pub fn sample_tight_profile(w: &WindowSpec, grid: &[f64], params: &QuadParams) -> Result<SampledProfile> {
    let values = profile_values(grid, |t| Ok(tight_window_adaptive(w, t, params)?.value))?;
    Ok(SampledProfile {
        label: format!("tight {w}"),
        gamma: w.gamma(),
        eps_half: params.eps_half,
        n_quad: params.n_quad,
        t_values: grid.to_vec(),
        values,
    })
}

/// Discrete L2 distance on a grid with its nominal uniform spacing.
fn l2_distance(grid: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (sum * h).sqrt()
}

/// Discrete L2 distance between the tight profiles generated by the Gaussian
/// and secant windows at the same gamma.
pub fn tight_equality_check(gamma: f64, grid: &[f64], params: &QuadParams) -> Result<f64> {
    let gauss = WindowSpec::gaussian(gamma)?;
    let sech = WindowSpec::hyperbolic_secant(gamma)?;
    let pg = sample_tight_profile(&gauss, grid, params)?;
    let ps = sample_tight_profile(&sech, grid, params)?;
    Ok(l2_distance(grid, &pg.values, &ps.values))
}

/// sin(pi t)/(pi t), the gamma -> 0 limit profile.
pub fn sinc_pi(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        (PI * t).sin() / (PI * t)
    }
}

/// Indicator of (-1/2, 1/2), the gamma -> infinity limit profile.
pub fn indicator_half(t: f64) -> f64 {
    if t.abs() < 0.5 {
        1.0
    } else {
        0.0
    }
}

/// Distances of one tight profile to the two limit shapes.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LimitDistances {
    pub gamma: f64,
    pub dist_sinc: f64,
    pub dist_indicator: f64,
}

/// For each gamma, the discrete L2 distances of the tight profile (computed
/// from the Gaussian form; the secant form is the same window) to sinc(pi t)
/// and to the indicator of (-1/2, 1/2).
pub fn limit_profiles(gammas: &[f64], grid: &[f64], params: &QuadParams) -> Result<Vec<LimitDistances>> {
    gammas
        .iter()
        .map(|&gamma| {
            let w = WindowSpec::gaussian(gamma)?;
            let profile = sample_tight_profile(&w, grid, params)?;
            let sinc_ref: Vec<f64> = grid.iter().map(|&t| sinc_pi(t)).collect();
            let ind_ref: Vec<f64> = grid.iter().map(|&t| indicator_half(t)).collect();
            Ok(LimitDistances {
                gamma,
                dist_sinc: l2_distance(grid, &profile.values, &sinc_ref),
                dist_indicator: l2_distance(grid, &profile.values, &ind_ref),
            })
        })
        .collect()
}
