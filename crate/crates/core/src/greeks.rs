//! Sensitivities of the log-normal approximant price to the basket's
//! mean, standard deviation and skewness.
//!
//! Writing `e^{m + s^2/2} = sigma / sqrt(x - 1)` and `tau = c mu - sigma / sqrt(x - 1)`,
//! the price depends on `(mu, sigma)` explicitly and on `eta` only through
//! `x = exp(s^2)`, so `dP/deta = dP/dx * dx/deta`.

use crate::calibrate_lognormal::{calibrate_lognormal, ShiftedLognormalParams, Sign, ETA_MIN};
use crate::error::{Error, Result};
use crate::moments::MomentSummary;
use crate::normal;
use crate::pricing::{pricing_terms, price_from_moments, PricingCase};

const BOUNDARY_TOL: f64 = 1e-12;

/// First-order sensitivities of the approximate price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreekTriple {
    pub dp_dmu: f64,
    pub dp_dsigma: f64,
    pub dp_deta: f64,
    pub dx_deta: f64,
    pub case: PricingCase,
}

/// `dx/deta` for the real root of `x^3 + 3x^2 - 4 - eta^2 = 0`.
///
/// Equal to `2 sinh(2/3 asinh(eta/2)) / (3 sqrt(1 + eta^2/4))`, which is odd
/// in `eta` and free of the cancellation in [`dx_deta_two_term`].
pub fn dx_deta(eta: f64) -> Result<f64> {
    if !(eta.abs() > ETA_MIN) {
        return Err(Error::DegenerateSkew { eta });
    }
    let q = (1.0 + 0.25 * eta * eta).sqrt();
    Ok(2.0 * ((2.0 / 3.0) * (0.5 * eta).asinh()).sinh() / (3.0 * q))
}

/// Literal sum of the derivatives of the two Cardano cube roots.
pub fn dx_deta_two_term(eta: f64) -> f64 {
    let q = (1.0 + 0.25 * eta * eta).sqrt();
    let base = 1.0 + 0.5 * eta * eta;
    let plus = base + eta * q;
    let minus = base - eta * q;
    let t1 = plus.powf(-2.0 / 3.0) * (eta + base / q) / 3.0;
    let t2 = minus.powf(-2.0 / 3.0) * (eta - base / q) / 3.0;
    t1 + t2
}

fn check_boundary(p: &ShiftedLognormalParams, strike: f64) -> Result<()> {
    let boundary = match p.c {
        Sign::Plus => p.tau,
        Sign::Minus => -p.tau,
    };
    if (strike - boundary).abs() < BOUNDARY_TOL * (1.0 + p.tau.abs()) {
        return Err(Error::CaseBoundary { strike, boundary });
    }
    Ok(())
}

/// Analytic `(dP/dmu, dP/dsigma, dP/deta)` at strike `K`.
///
/// `p` must be the calibration of `ms`. Strikes within `1e-12 (1 + |tau|)`
/// of the case boundary are rejected.
pub fn greeks_lognormal(
    p: &ShiftedLognormalParams,
    ms: &MomentSummary,
    strike: f64,
    rate: f64,
    horizon: f64,
) -> Result<GreekTriple> {
    check_boundary(p, strike)?;
    let disc = (-rate * horizon).exp();
    let dxde = dx_deta(ms.eta)?;
    let terms = pricing_terms(p, strike);
    let x = p.x;
    let xm1 = p.x_minus_one;
    let root_xm1 = xm1.sqrt();
    let (dp_dmu, dp_dsigma, dp_deta) = match terms.case {
        PricingCase::PlusStrikeAtOrBelowShift => (disc, 0.0, 0.0),
        PricingCase::MinusStrikeAtOrAboveShift => (0.0, 0.0, 0.0),
        PricingCase::PlusStrikeAboveShift => {
            let (n11, n12) = (normal::cdf(terms.d11), normal::cdf(terms.d12));
            let dp_dx = disc * ms.sigma / (2.0 * root_xm1)
                * ((n12 - n11) / xm1 + normal::pdf(terms.d11) / (x * p.s));
            (disc * n12, disc * (n11 - n12) / root_xm1, dp_dx * dxde)
        }
        PricingCase::MinusStrikeBelowShift => {
            let (n21, n22) = (normal::cdf(terms.d21), normal::cdf(terms.d22));
            let dp_dx = disc * ms.sigma / (2.0 * root_xm1)
                * ((n21 - n22) / xm1 + normal::pdf(terms.d21) / (x * p.s));
            (disc * n22, disc * (n22 - n21) / root_xm1, dp_dx * dxde)
        }
    };
    Ok(GreekTriple {
        dp_dmu,
        dp_dsigma,
        dp_deta,
        dx_deta: dxde,
        case: terms.case,
    })
}

/// Calibrates `ms` and returns its Greeks at `K`.
pub fn greeks_from_moments(
    ms: &MomentSummary,
    strike: f64,
    rate: f64,
    horizon: f64,
) -> Result<GreekTriple> {
    let p = calibrate_lognormal(ms)?;
    greeks_lognormal(&p, ms, strike, rate, horizon)
}

/// Central finite differences of the full pipeline in `(mu, sigma, eta)`,
/// re-calibrating at every bump. Bumps are `rel_bump * |v|`.
pub fn finite_difference_greeks(
    ms: &MomentSummary,
    strike: f64,
    rate: f64,
    horizon: f64,
    rel_bump: f64,
) -> Result<[f64; 3]> {
    let price = |mu: f64, sigma: f64, eta: f64| -> Result<f64> {
        let bumped = MomentSummary::from_summary(mu, sigma, eta);
        Ok(price_from_moments(&bumped, strike, rate, horizon, None)?.price)
    };
    let step = |v: f64| rel_bump * v.abs().max(f64::MIN_POSITIVE);
    let (mu, sigma, eta) = (ms.mu, ms.sigma, ms.eta);
    let hm = step(mu);
    let hs = step(sigma);
    let he = step(eta);
    Ok([
        (price(mu + hm, sigma, eta)? - price(mu - hm, sigma, eta)?) / (2.0 * hm),
        (price(mu, sigma + hs, eta)? - price(mu, sigma - hs, eta)?) / (2.0 * hs),
        (price(mu, sigma, eta + he)? - price(mu, sigma, eta - he)?) / (2.0 * he),
    ])
}

/// Leading coefficients `(A, B)` of `dP/deta = A / eta^2 + B / eta + O(1)`
/// for small skewness in the `c = -1, K < -tau` branch:
/// `A = 3 e^{-rT} sigma (Phi(d21) - Phi(d22))`, `B = e^{-rT} sigma phi(d21)`.
pub fn small_skew_diagnostic(
    p: &ShiftedLognormalParams,
    ms: &MomentSummary,
    strike: f64,
    rate: f64,
    horizon: f64,
) -> Result<(f64, f64)> {
    let terms = pricing_terms(p, strike);
    if terms.case != PricingCase::MinusStrikeBelowShift {
        return Err(Error::WrongBranch);
    }
    if ms.sigma == 0.0 {
        return Ok((0.0, 0.0));
    }
    let scale = (-rate * horizon).exp() * ms.sigma;
    let a = 3.0 * scale * (normal::cdf(terms.d21) - normal::cdf(terms.d22));
    let b = scale * normal::pdf(terms.d21);
    Ok((a, b))
}
