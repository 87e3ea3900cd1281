//! Call prices under the calibrated approximants.
//!
//! The log-normal approximant has a four-branch closed form selected by the
//! sign `c` and the position of the strike relative to the shift `tau`. The
//! mixture approximant is the same formula conditional on `Y`, integrated
//! against the law of `Y`.

use std::fmt;

use crate::basket::BasketSpec;
use crate::calibrate_lognormal::{calibrate_lognormal, ShiftedLognormalParams, Sign, ETA_MIN};
use crate::calibrate_mixture::{calibrate_mixture, MixtureParams};
use crate::error::{Error, Result};
use crate::law::MixingLaw;
use crate::moments::{basket_moments_lognormal, basket_moments_mixture, MomentSummary};
use crate::normal;
use crate::quadrature::{integrate, Quadrature};

const QUAD_REL_TOL: f64 = 1e-10;
const QUAD_ABS_TOL: f64 = 1e-14;
const QUAD_MAX_INTERVALS: usize = 4000;
const TAIL_MASS: f64 = 1e-12;
const TAIL_WARNING: f64 = 1e-10;
const MAX_TAIL_PIECES: usize = 40;
/// Below this the conditional integrand is evaluated at its small-`Y` limit.
const Y_FLOOR: f64 = 1e-12;
/// `ln(K - tau)` underflows below this; the in-the-money limit is used instead.
const LOG_UNDERFLOW: f64 = 1e-300;

/// Which of the four closed-form branches applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PricingCase {
    /// `c = +1, K <= tau`: the option is always exercised.
    PlusStrikeAtOrBelowShift,
    /// `c = +1, K > tau`.
    PlusStrikeAboveShift,
    /// `c = -1, K >= -tau`: the approximant never finishes in the money.
    MinusStrikeAtOrAboveShift,
    /// `c = -1, K < -tau`.
    MinusStrikeBelowShift,
}

impl PricingCase {
    pub fn select(c: Sign, strike: f64, tau: f64) -> Self {
        match c {
            Sign::Plus if strike <= tau => Self::PlusStrikeAtOrBelowShift,
            Sign::Plus => Self::PlusStrikeAboveShift,
            Sign::Minus if strike >= -tau => Self::MinusStrikeAtOrAboveShift,
            Sign::Minus => Self::MinusStrikeBelowShift,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::PlusStrikeAtOrBelowShift => "c=+1,K<=tau",
            Self::PlusStrikeAboveShift => "c=+1,K>tau",
            Self::MinusStrikeAtOrAboveShift => "c=-1,K>=-tau",
            Self::MinusStrikeBelowShift => "c=-1,K<-tau",
        }
    }
}

impl fmt::Display for PricingCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Standardized log-boundary terms of the closed form. Terms that do not
/// belong to the selected case are NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PricingTerms {
    pub d11: f64,
    pub d12: f64,
    pub d21: f64,
    pub d22: f64,
    pub case: PricingCase,
}

/// Computes the d-terms for a log-normal approximant and strike.
pub fn pricing_terms(p: &ShiftedLognormalParams, strike: f64) -> PricingTerms {
    let case = PricingCase::select(p.c, strike, p.tau);
    let (mut d11, mut d12, mut d21, mut d22) = (f64::NAN, f64::NAN, f64::NAN, f64::NAN);
    match case {
        PricingCase::PlusStrikeAboveShift => {
            let l = (strike - p.tau).ln();
            d12 = (p.m - l) / p.s;
            d11 = d12 + p.s;
        }
        PricingCase::MinusStrikeBelowShift => {
            let l = (-strike - p.tau).ln();
            d22 = (l - p.m) / p.s;
            d21 = d22 - p.s;
        }
        _ => {}
    }
    PricingTerms {
        d11,
        d12,
        d21,
        d22,
        case,
    }
}

/// How a price was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PricingMethod {
    ClosedFormLognormal,
    MixtureQuadrature,
    /// Normal approximation used when the basket skewness is (numerically) zero.
    NormalFallback,
    /// Zero-variance basket: discounted intrinsic value.
    Deterministic,
    BlackScholes,
}

impl PricingMethod {
    pub fn label(self) -> &'static str {
        match self {
            Self::ClosedFormLognormal => "closed_form_lognormal",
            Self::MixtureQuadrature => "mixture_quadrature",
            Self::NormalFallback => "normal_fallback",
            Self::Deterministic => "deterministic",
            Self::BlackScholes => "black_scholes",
        }
    }
}

/// A price with the branch and numerical diagnostics that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceResult {
    pub price: f64,
    pub method: PricingMethod,
    pub case: Option<PricingCase>,
    /// Absolute error estimate of the quadrature, when one was needed.
    pub quad_error: Option<f64>,
    pub warnings: Vec<String>,
}

impl PriceResult {
    fn simple(price: f64, method: PricingMethod, case: Option<PricingCase>) -> Self {
        Self {
            price,
            method,
            case,
            quad_error: None,
            warnings: Vec::new(),
        }
    }
}

/// Price of `e^{-rT} E[(c(exp(sN + m) + tau) - K)^+]`.
pub fn price_lognormal(
    p: &ShiftedLognormalParams,
    strike: f64,
    rate: f64,
    horizon: f64,
) -> PriceResult {
    let disc = (-rate * horizon).exp();
    let forward_part = (p.m + 0.5 * p.s * p.s).exp();
    let terms = pricing_terms(p, strike);
    let price = match terms.case {
        PricingCase::PlusStrikeAtOrBelowShift => disc * (forward_part + p.tau - strike),
        PricingCase::PlusStrikeAboveShift => {
            let gap = strike - p.tau;
            if gap < LOG_UNDERFLOW {
                disc * (forward_part - gap)
            } else {
                disc * (forward_part * normal::cdf(terms.d11) - gap * normal::cdf(terms.d12))
            }
        }
        PricingCase::MinusStrikeAtOrAboveShift => 0.0,
        PricingCase::MinusStrikeBelowShift => {
            let gap = -strike - p.tau;
            disc * (gap * normal::cdf(terms.d22) - forward_part * normal::cdf(terms.d21))
        }
    };
    PriceResult::simple(
        price.max(0.0),
        PricingMethod::ClosedFormLognormal,
        Some(terms.case),
    )
}

/// Expectation of `h(Y)` under the law: atom evaluation or density quadrature.
pub fn law_expectation<F>(law: &MixingLaw, h: F) -> Result<(f64, Quadrature, Vec<String>)>
where
    F: Fn(f64) -> f64,
{
    if let Some(v) = law.atom() {
        let q = Quadrature {
            value: h(v),
            abs_error: 0.0,
            intervals: 0,
            converged: true,
        };
        return Ok((q.value, q, Vec::new()));
    }
    if !law.has_density() {
        return Err(Error::LawCapability {
            law: law.label().to_string(),
            what: "a density or an atom",
        });
    }
    let density = |y: f64| law.density(y).unwrap_or(0.0);
    let integrand = |y: f64| {
        let f = density(y);
        if f == 0.0 {
            0.0
        } else {
            h(y) * f
        }
    };
    let y_max = truncation_point(law);

    let body = integrate(integrand, 0.0, y_max, QUAD_ABS_TOL, QUAD_REL_TOL, QUAD_MAX_INTERVALS);
    if !body.converged {
        return Err(Error::QuadratureNonConvergence {
            estimate: body.value,
            error: body.abs_error,
            intervals: body.intervals,
        });
    }
    let (mut value, mut abs_error, mut intervals) = (body.value, body.abs_error, body.intervals);
    let mut warnings = Vec::new();
    let mut lo = y_max;
    for piece_index in 0..MAX_TAIL_PIECES {
        let hi = 2.0 * lo;
        let piece = integrate(integrand, lo, hi, QUAD_ABS_TOL, QUAD_REL_TOL, QUAD_MAX_INTERVALS);
        value += piece.value;
        abs_error += piece.abs_error;
        intervals += piece.intervals;
        lo = hi;
        if piece.value.abs() <= TAIL_MASS * value.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if piece_index + 1 == MAX_TAIL_PIECES && piece.value.abs() > TAIL_WARNING * value.abs() {
            warnings.push(format!(
                "tail beyond y = {lo:.3e} not integrated; last piece contributed {:.3e}",
                piece.value
            ));
        }
    }
    let q = Quadrature {
        value,
        abs_error,
        intervals,
        converged: true,
    };
    Ok((value, q, warnings))
}

/// Point beyond which the law carries less than `1e-12` probability.
fn truncation_point(law: &MixingLaw) -> f64 {
    let mut y = 1.0;
    if law.survival(1.0).is_some() {
        while law.survival(y).unwrap_or(0.0) > TAIL_MASS && y < 1e18 {
            y *= 2.0;
        }
        return y;
    }
    let density = |t: f64| law.density(t).unwrap_or(0.0);
    while y < 1e18 {
        let piece = integrate(density, y, 2.0 * y, 1e-16, 1e-6, 200).value;
        if piece < 0.1 * TAIL_MASS {
            break;
        }
        y *= 2.0;
    }
    y
}

/// Price of `e^{-rT} E[(c(exp(s sqrt(Y) N + m) + tau) - K)^+]`.
pub fn price_mixture(
    p: &MixtureParams,
    strike: f64,
    rate: f64,
    horizon: f64,
) -> Result<PriceResult> {
    let disc = (-rate * horizon).exp();
    let x = p.s * p.s;
    let case = PricingCase::select(p.c, strike, p.tau);
    let m = p.m;
    let s = p.s;
    let (expectation, quad, warnings) = match case {
        PricingCase::PlusStrikeAtOrBelowShift => {
            let forward = (m + p.law.log_mgf_checked(0.5 * x)?).exp();
            return Ok(PriceResult::simple(
                (disc * (forward + p.tau - strike)).max(0.0),
                PricingMethod::MixtureQuadrature,
                Some(case),
            ));
        }
        PricingCase::MinusStrikeAtOrAboveShift => {
            return Ok(PriceResult::simple(0.0, PricingMethod::MixtureQuadrature, Some(case)));
        }
        PricingCase::PlusStrikeAboveShift => {
            let gap = strike - p.tau;
            let l = gap.max(LOG_UNDERFLOW).ln();
            law_expectation(&p.law, |y| {
                let y = y.max(Y_FLOOR);
                let vol = s * y.sqrt();
                let d12 = (m - l) / vol;
                let d11 = d12 + vol;
                (0.5 * x * y + m).exp() * normal::cdf(d11) - gap * normal::cdf(d12)
            })?
        }
        PricingCase::MinusStrikeBelowShift => {
            let gap = -strike - p.tau;
            let l = gap.ln();
            law_expectation(&p.law, |y| {
                let y = y.max(Y_FLOOR);
                let vol = s * y.sqrt();
                let d22 = (l - m) / vol;
                let d21 = d22 - vol;
                gap * normal::cdf(d22) - (0.5 * x * y + m).exp() * normal::cdf(d21)
            })?
        }
    };
    let mut all_warnings = p.diagnostics.clone();
    all_warnings.extend(warnings);
    Ok(PriceResult {
        price: (disc * expectation).max(0.0),
        method: PricingMethod::MixtureQuadrature,
        case: Some(case),
        quad_error: Some(disc * quad.abs_error),
        warnings: all_warnings,
    })
}

/// Normal (Bachelier-style) approximation `e^{-rT}[(mu-K) Phi(d) + sigma phi(d)]`.
pub fn normal_fallback_price(mu: f64, sigma: f64, strike: f64, rate: f64, horizon: f64) -> f64 {
    let disc = (-rate * horizon).exp();
    if sigma <= 0.0 {
        return disc * (mu - strike).max(0.0);
    }
    let d = (mu - strike) / sigma;
    disc * ((mu - strike) * normal::cdf(d) + sigma * normal::pdf(d))
}

/// Black-Scholes value of a European call.
pub fn black_scholes_call(spot: f64, strike: f64, vol: f64, rate: f64, horizon: f64) -> f64 {
    let disc = (-rate * horizon).exp();
    if strike <= 0.0 {
        return spot - strike * disc;
    }
    let sd = vol * horizon.sqrt();
    if sd <= 0.0 {
        return disc * (spot * (rate * horizon).exp() - strike).max(0.0);
    }
    let d1 = ((spot / strike).ln() + rate * horizon) / sd + 0.5 * sd;
    let d2 = d1 - sd;
    spot * normal::cdf(d1) - strike * disc * normal::cdf(d2)
}

/// Full pipeline: moments, calibration, price. `law = None` is the log-normal model.
///
/// Zero-variance baskets return the discounted intrinsic value and
/// baskets with `|eta| <= 1e-8` use [`normal_fallback_price`]; both are
/// labelled in [`PriceResult::method`].
pub fn price_basket(spec: &BasketSpec, law: Option<&MixingLaw>) -> Result<PriceResult> {
    let ms = match law {
        None => basket_moments_lognormal(spec),
        Some(l) => basket_moments_mixture(spec, l),
    }
    .map_err(|e| e.context("basket moments"))?;
    price_from_moments(&ms, spec.strike, spec.rate, spec.horizon, law)
}

/// Pricing step of [`price_basket`] for precomputed moments.
pub fn price_from_moments(
    ms: &MomentSummary,
    strike: f64,
    rate: f64,
    horizon: f64,
    law: Option<&MixingLaw>,
) -> Result<PriceResult> {
    if ms.sigma == 0.0 {
        let price = (-rate * horizon).exp() * (ms.mu - strike).max(0.0);
        return Ok(PriceResult::simple(price, PricingMethod::Deterministic, None));
    }
    if ms.eta.abs() <= ETA_MIN {
        let price = normal_fallback_price(ms.mu, ms.sigma, strike, rate, horizon);
        let mut r = PriceResult::simple(price, PricingMethod::NormalFallback, None);
        r.warnings
            .push(format!("skewness {:.3e} below threshold; normal approximation used", ms.eta));
        return Ok(r);
    }
    match law {
        None => {
            let p = calibrate_lognormal(ms).map_err(|e| e.context("log-normal calibration"))?;
            Ok(price_lognormal(&p, strike, rate, horizon))
        }
        Some(l) => {
            let p = calibrate_mixture(ms, l)
                .map_err(|e| e.context(format!("{} calibration", l.label())))?;
            price_mixture(&p, strike, rate, horizon)
                .map_err(|e| e.context(format!("{} pricing", l.label())))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::builtin_law;

    #[test]
    fn branch_one_is_forward_minus_strike() {
        // mu = e^{m + s^2/2} + tau = 20 with tau = 15
        let s: f64 = 0.3;
        let m = 5f64.ln() - 0.5 * s * s;
        let p = ShiftedLognormalParams::new(Sign::Plus, s, m, 15.0);
        let r = price_lognormal(&p, 10.0, 0.0, 1.0);
        assert_eq!(r.case, Some(PricingCase::PlusStrikeAtOrBelowShift));
        assert!((r.price - 10.0).abs() < 1e-12);
    }

    #[test]
    fn negative_branch_out_of_reach_is_zero() {
        let p = ShiftedLognormalParams::new(Sign::Minus, 0.2, 1.0, -30.0);
        assert_eq!(price_lognormal(&p, 30.0, 0.02, 1.0).price, 0.0);
        assert_eq!(price_lognormal(&p, 45.0, 0.02, 1.0).price, 0.0);
        assert!(price_lognormal(&p, 20.0, 0.02, 1.0).price > 0.0);
    }

    #[test]
    fn d_terms_relations() {
        let p = ShiftedLognormalParams::new(Sign::Plus, 0.25, 2.0, 3.0);
        let t = pricing_terms(&p, 12.0);
        assert!((t.d11 - t.d12 - 0.25).abs() < 1e-15);
        let q = ShiftedLognormalParams::new(Sign::Minus, 0.25, 2.0, -30.0);
        let t = pricing_terms(&q, 12.0);
        assert!((t.d21 - t.d22 + 0.25).abs() < 1e-15);
        assert_eq!(t.case, PricingCase::MinusStrikeBelowShift);
    }

    #[test]
    fn black_scholes_limits() {
        assert!((black_scholes_call(100.0, 90.0, 0.0, 0.05, 2.0)
            - (100.0 - 90.0 * (-0.1f64).exp()))
        .abs()
            < 1e-12);
        assert_eq!(black_scholes_call(100.0, 0.0, 0.3, 0.05, 1.0), 100.0);
        assert!((black_scholes_call(100.0, 100.0, 0.2, 0.03, 1.0) - 9.413).abs() < 1e-3);
    }

    #[test]
    fn deterministic_basket_price() {
        let spec =
            BasketSpec::pair([1.0, 1.0], [60.0, 50.0], [0.0, 0.0], 0.5, 0.0, 1.0, 100.0).unwrap();
        let r = price_basket(&spec, None).unwrap();
        assert_eq!(r.method, PricingMethod::Deterministic);
        assert!((r.price - 10.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_spread_uses_fallback() {
        let spec =
            BasketSpec::pair([1.0, -1.0], [100.0, 100.0], [0.2, 0.2], 0.5, 0.0, 1.0, 5.0).unwrap();
        let r = price_basket(&spec, None).unwrap();
        assert_eq!(r.method, PricingMethod::NormalFallback);
        assert!(r.price > 0.0);
    }

    #[test]
    fn mixture_without_density_or_atom() {
        let law = MixingLaw::new("bare", |s| 1.0 / (1.0 - s), 1.0);
        let spec =
            BasketSpec::pair([-1.0, 1.0], [100.0, 120.0], [0.2, 0.3], 0.9, 0.03, 1.0, 16.0).unwrap();
        let err = price_basket(&spec, Some(&law)).unwrap_err();
        assert!(matches!(err.root(), Error::LawCapability { .. }));
    }

    #[test]
    fn exp1_expectation_of_y() {
        let law = builtin_law("exp1").unwrap();
        let (v, q, w) = law_expectation(&law, |y| y).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
        assert!(q.abs_error < 1e-9);
        assert!(w.is_empty());
    }
}
