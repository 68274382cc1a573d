//! Zak transforms of the analytic windows, by direct series and closed form.
//!
//! The Zak transform of a window g is
//!
//! ```text
//! (Zg)(t, nu) = sum_l g(t - l) e^(2 pi i l nu)
//! ```
//!
//! quasi-periodic on the unit cell: Zg(t+1, nu) = e^(2 pi i nu) Zg(t, nu) and
//! Zg(t, nu+1) = Zg(t, nu).
//!
//! Closed forms, with q = e^(-pi gamma) and q' = e^(-pi/gamma):
//!
//! ```text
//! (Z g_gauss)(t, nu) = (2 gamma)^(1/4) e^(-pi gamma t^2) theta3(pi(nu - i gamma t); q)
//! (Z g_sech)(t, nu)  = 2^(-1/2) pi^(1/2) gamma theta1'(0; q) e^(-pi gamma t^2)
//!                      * theta3(pi(nu - i gamma t); q) / [theta4(pi nu; q) theta4(pi t; q')]
//! ```
//!
//! The closed-form evaluators fold t into [-1/2, 1/2] first (a pure phase by
//! quasi-periodicity), which keeps the theta3 argument within one half
//! quasi-period of the real axis.
//!
//! Series summation is symmetric around the nearest integer to t, accumulated
//! from the farthest pair inward; output is bitwise-deterministic.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};
use crate::theta::{theta1_prime0, theta3_reduced, theta_eval, ThetaKind, ThetaNome};
use crate::windows::{WindowKind, WindowSpec};

/// Tail bound above which a requested truncation is rejected.
const TAIL_REJECT: f64 = 1e-10;

/// Default summation half-width for the decay e^(-pi gamma |l|):
/// `ceil(20 / (gamma pi)) + 10`.
pub fn default_terms(gamma: f64) -> usize {
    (20.0 / (gamma * PI)).ceil() as usize + 10
}

/// Which evaluator fills a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZakMethod {
    Direct,
    Closed,
}

/// Grid offsets in [0, 1) for the t and nu axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOffsets {
    pub t: f64,
    pub nu: f64,
}

impl GridOffsets {
    pub fn zero() -> Self {
        Self { t: 0.0, nu: 0.0 }
    }

    /// Half-cell offset 1/(2n) on each axis, for computations that must not
    /// touch t = 1/2 exactly.
    pub fn half_cell(n_t: usize, n_nu: usize) -> Self {
        Self { t: 0.5 / n_t as f64, nu: 0.5 / n_nu as f64 }
    }
}

/// Complex Zak-transform samples on a unit-cell grid, row-major over t then nu:
/// `values[j * n_nu + k] = Zg(j/n_t + t_offset, k/n_nu + nu_offset)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZakField {
    pub n_t: usize,
    pub n_nu: usize,
    pub t_offset: f64,
    pub nu_offset: f64,
    pub method: ZakMethod,
    pub truncation: usize,
    pub values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct ZakFieldJson {
    n_t: usize,
    n_nu: usize,
    t_offset: f64,
    nu_offset: f64,
    method: ZakMethod,
    truncation: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl ZakField {
    pub fn t_at(&self, j: usize) -> f64 {
        j as f64 / self.n_t as f64 + self.t_offset
    }

    pub fn nu_at(&self, k: usize) -> f64 {
        k as f64 / self.n_nu as f64 + self.nu_offset
    }

    pub fn value(&self, j: usize, k: usize) -> Complex64 {
        self.values[j * self.n_nu + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// CSV rows `t,nu,re,im` with 17-significant-digit floats.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "t,nu,re,im")?;
        for j in 0..self.n_t {
            for k in 0..self.n_nu {
                let v = self.value(j, k);
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{:.16e}",
                    self.t_at(j),
                    self.nu_at(k),
                    v.re,
                    v.im
                )?;
            }
        }
        Ok(())
    }

    /// JSON document with grid metadata and flat re/im arrays.
    pub fn to_json(&self) -> Result<String> {
        let doc = ZakFieldJson {
            n_t: self.n_t,
            n_nu: self.n_nu,
            t_offset: self.t_offset,
            nu_offset: self.nu_offset,
            method: self.method,
            truncation: self.truncation,
            re: self.values.iter().map(|v| v.re).collect(),
            im: self.values.iter().map(|v| v.im).collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ZakFieldJson = serde_json::from_str(s)?;
        if doc.re.len() != doc.n_t * doc.n_nu || doc.im.len() != doc.re.len() {
            return Err(Error::Serialization("field size mismatch".into()));
        }
        Ok(Self {
            n_t: doc.n_t,
            n_nu: doc.n_nu,
            t_offset: doc.t_offset,
            nu_offset: doc.nu_offset,
            method: doc.method,
            truncation: doc.truncation,
            values: doc.re.iter().zip(&doc.im).map(|(&re, &im)| Complex64::new(re, im)).collect(),
        })
    }
}

fn check_truncation(w: &WindowSpec, l_max: usize) -> Result<()> {
    if l_max < 1 {
        return Err(Error::TruncationTooSmall { context: "zak series needs l_max >= 1", bound: f64::INFINITY });
    }
    let bound = w.tail_bound(l_max as f64 + 0.5);
    if bound > TAIL_REJECT {
        return Err(Error::TruncationTooSmall { context: "zak series tail", bound });
    }
    Ok(())
}

/// Direct truncated Zak series `sum_{|l - round(t)| <= l_max} g(t-l) e^(2 pi i l nu)`.
pub fn zak_direct(w: &WindowSpec, t: f64, nu: f64, l_max: usize) -> Result<Complex64> {
    check_truncation(w, l_max)?;
    let center = t.round() as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in (1..=l_max as i64).rev() {
        for l in [center - k, center + k] {
            let phase = Complex64::from_polar(1.0, 2.0 * PI * l as f64 * nu);
            acc += w.eval(t - l as f64) * phase;
        }
    }
    acc += w.eval(t - center as f64) * Complex64::from_polar(1.0, 2.0 * PI * center as f64 * nu);
    Ok(acc)
}

/// Fold t to t' in [-1/2, 1/2]; returns (t', e^(2 pi i l0 nu)) with l0 = t - t'.
fn fold_t(t: f64, nu: f64) -> (f64, Complex64) {
    let l0 = t.round();
    let phase = if l0 == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, 2.0 * PI * l0 * nu)
    };
    (t - l0, phase)
}

/// Closed form of the Gaussian Zak transform via theta3.
pub fn zak_gaussian_closed(gamma: f64, t: f64, nu: f64) -> Result<Complex64> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::InvalidGamma(gamma));
    }
    let (tf, phase) = fold_t(t, nu);
    let z = Complex64::new(PI * nu, -PI * gamma * tf);
    let th3 = theta3_reduced(z, gamma)?;
    let amp = (2.0 * gamma).powf(0.25) * (-PI * gamma * tf * tf).exp();
    Ok(phase * amp * th3)
}

/// Truncated series `(pi gamma / 2)^(1/2) sum_n e^(2 pi i n nu) / cosh(pi gamma (t - n))`,
/// the direct Zak series of the secant window.
pub fn zak_sech_series(gamma: f64, t: f64, nu: f64, n_max: usize) -> Result<Complex64> {
    let w = WindowSpec::hyperbolic_secant(gamma)?;
    zak_direct(&w, t, nu, n_max)
}

/// Closed form of the secant Zak transform: the theta3 numerator of the
/// Gaussian case divided by the two positive theta4 factors.
pub fn zak_sech_closed(gamma: f64, t: f64, nu: f64) -> Result<Complex64> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::InvalidGamma(gamma));
    }
    let (tf, phase) = fold_t(t, nu);
    let nome_g = ThetaNome::from_gamma(gamma)?;
    let nome_dual = ThetaNome::from_gamma(1.0 / gamma)?;
    let th1p = theta1_prime0(&nome_g)?;
    let z = Complex64::new(PI * nu, -PI * gamma * tf);
    let th3 = theta3_reduced(z, gamma)?;
    let th4_nu = theta_eval(ThetaKind::Theta4, Complex64::new(PI * nu, 0.0), &nome_g)?.re;
    let th4_t = theta_eval(ThetaKind::Theta4, Complex64::new(PI * tf, 0.0), &nome_dual)?.re;
    let amp = PI.sqrt() / 2.0f64.sqrt() * gamma * th1p * (-PI * gamma * tf * tf).exp();
    Ok(phase * amp * th3 / (th4_nu * th4_t))
}

/// Closed-form Zak transform dispatched on the window kind.
pub fn zak_closed(w: &WindowSpec, t: f64, nu: f64) -> Result<Complex64> {
    match w.kind() {
        WindowKind::Gaussian => zak_gaussian_closed(w.gamma(), t, nu),
        WindowKind::HyperbolicSecant => zak_sech_closed(w.gamma(), t, nu),
    }
}

/// Fill a Zak field over the unit cell with the selected evaluator.
///
/// Rows are computed in parallel; each point is independent, so the result is
/// identical for any thread count.
pub fn zak_grid(
    w: &WindowSpec,
    n_t: usize,
    n_nu: usize,
    offsets: GridOffsets,
    method: ZakMethod,
) -> Result<ZakField> {
    if n_t < 2 {
        return Err(Error::GridTooSmall(n_t, 2));
    }
    if n_nu < 2 {
        return Err(Error::GridTooSmall(n_nu, 2));
    }
    let l_max = default_terms(w.gamma());
    let rows: Vec<Vec<Complex64>> = (0..n_t)
        .into_par_iter()
        .map(|j| -> Result<Vec<Complex64>> {
            let t = j as f64 / n_t as f64 + offsets.t;
            (0..n_nu)
                .map(|k| {
                    let nu = k as f64 / n_nu as f64 + offsets.nu;
                    match method {
                        ZakMethod::Direct => zak_direct(w, t, nu, l_max),
                        ZakMethod::Closed => zak_closed(w, t, nu),
                    }
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(ZakField {
        n_t,
        n_nu,
        t_offset: offsets.t,
        nu_offset: offsets.nu,
        method,
        truncation: l_max,
        values: rows.into_iter().flatten().collect(),
    })
}
