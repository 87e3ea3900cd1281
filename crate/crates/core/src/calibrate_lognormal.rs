//! Closed-form moment matching of `c (exp(s N + m) + tau)` to a basket.
//!
//! Fixing `c = sgn(eta)` collapses the three moment conditions onto the cubic
//! `x^3 + 3x^2 - 4 - eta^2 = 0` in `x = exp(s^2)`. Its single real root comes
//! from Cardano's formula
//!
//! ```text
//! x = cbrt(1 + eta^2/2 + eta sqrt(1 + eta^2/4)) + cbrt(1 + eta^2/2 - eta sqrt(1 + eta^2/4)) - 1
//! ```
//!
//! and the remaining parameters are explicit in `(mu, sigma, x)`.

use crate::error::{Error, Result};
use crate::moments::MomentSummary;

/// Below this |skewness| the calibration is singular (`m -> inf`).
pub const ETA_MIN: f64 = 1e-8;

/// Overall sign `c` of the shifted log-normal approximant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(v: f64) -> Self {
        if v < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Calibrated approximant `c (exp(s N + m) + tau)` with `x = exp(s^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedLognormalParams {
    pub c: Sign,
    pub s: f64,
    pub m: f64,
    pub tau: f64,
    pub x: f64,
    /// `x - 1`, kept separately because `x` is close to 1 for small skewness.
    pub x_minus_one: f64,
}

impl ShiftedLognormalParams {
    /// Parameters from `(c, s, m, tau)`.
    pub fn new(c: Sign, s: f64, m: f64, tau: f64) -> Self {
        let x_minus_one = (s * s).exp_m1();
        Self {
            c,
            s,
            m,
            tau,
            x: 1.0 + x_minus_one,
            x_minus_one,
        }
    }
}

/// `x - 1` for the real root of `x^3 + 3x^2 - 4 - eta^2 = 0`.
///
/// The two Cardano cube roots are `u^(1/3)` and `u^(-1/3)` with
/// `u = (sqrt(1 + eta^2/4) + |eta|/2)^2`, so their sum minus one equals
/// `1 + 4 sinh^2(asinh(|eta|/2) / 3)`. This form has no cancellation for
/// small or large `|eta|`.
pub fn cubic_skew_excess(eta: f64) -> f64 {
    let h = ((eta.abs() * 0.5).asinh() / 3.0).sinh();
    4.0 * h * h
}

/// Real root `x >= 1` of `x^3 + 3x^2 - 4 - eta^2 = 0`; `x = 1` iff `eta = 0`.
pub fn solve_cubic_skew(eta: f64) -> f64 {
    1.0 + cubic_skew_excess(eta)
}

/// Residual of the skewness cubic at `x`.
pub fn cubic_residual(x: f64, eta: f64) -> f64 {
    // (x - 1)(x + 2)^2 - eta^2 expands to the cubic
    let xm1 = x - 1.0;
    xm1 * (x + 2.0) * (x + 2.0) - eta * eta
}

/// Moment-matching parameters for a basket summary.
pub fn calibrate_lognormal(ms: &MomentSummary) -> Result<ShiftedLognormalParams> {
    if !(ms.sigma > 0.0) {
        return Err(Error::ZeroVariance);
    }
    if !(ms.eta.abs() > ETA_MIN) {
        return Err(Error::DegenerateSkew { eta: ms.eta });
    }
    let c = Sign::of(ms.eta);
    let x_minus_one = cubic_skew_excess(ms.eta);
    let x = 1.0 + x_minus_one;
    let s = x_minus_one.ln_1p().sqrt();
    let m = 0.5 * ((ms.sigma * ms.sigma) / (x * x_minus_one)).ln();
    let tau = c.value() * ms.mu - ms.sigma / x_minus_one.sqrt();
    Ok(ShiftedLognormalParams {
        c,
        s,
        m,
        tau,
        x,
        x_minus_one,
    })
}

/// Closed-form first three moments of `c (exp(s N + m) + tau)`.
pub fn approximant_moments_lognormal(p: &ShiftedLognormalParams) -> MomentSummary {
    let s2 = p.s * p.s;
    let e1 = (p.m + 0.5 * s2).exp();
    let e2 = (2.0 * p.m + 2.0 * s2).exp();
    let e3 = (3.0 * p.m + 4.5 * s2).exp();
    let t = p.tau;
    let c = p.c.value();
    let m1 = c * (e1 + t);
    let m2 = e2 + 2.0 * t * e1 + t * t;
    let m3 = c * (e3 + 3.0 * t * e2 + 3.0 * t * t * e1 + t * t * t);
    MomentSummary::summarize(m1, m2, m3)
}
