//! Exact raw moments and the (mean, stdev, skewness) summary of a basket.
//!
//! Under the log-normal model the `k`-th raw moment is a `k`-fold sum over
//! asset tuples of `prod w S * exp(T * sum_{pairs} rho sigma sigma)`. Under a
//! normal variance mixture each pairwise exponent becomes an MGF ratio
//! evaluated at the tuple's total half-variance. Mixed-sign weights make the
//! triple sum prone to cancellation, so all sums are compensated.

use crate::basket::BasketSpec;
use crate::error::{Error, Result};
use crate::law::MixingLaw;

const NEGATIVE_VARIANCE_TOL: f64 = 1e-9;
const ZERO_SKEW_TOL: f64 = 1e-12;

/// First three raw moments of the basket and the derived summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub mu: f64,
    pub sigma: f64,
    /// Skewness; reported as 0 when `sigma == 0` (see [`MomentSummary::skew_defined`]).
    pub eta: f64,
}

impl MomentSummary {
    /// Summary from raw moments.
    ///
    /// A variance slightly below zero (relative `1e-9` of `m1^2`) is treated
    /// as cancellation noise and clamped; anything more negative is an error.
    pub fn from_raw(m1: f64, m2: f64, m3: f64) -> Result<Self> {
        let variance = m2 - m1 * m1;
        if variance < -NEGATIVE_VARIANCE_TOL * (m1 * m1).max(f64::MIN_POSITIVE) {
            return Err(Error::DegenerateBasket { variance });
        }
        Ok(Self::summarize(m1, m2, m3))
    }

    /// Same as [`MomentSummary::from_raw`] but clamps any negative variance.
    pub(crate) fn summarize(m1: f64, m2: f64, m3: f64) -> Self {
        let sigma = (m2 - m1 * m1).max(0.0).sqrt();
        let third_central = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
        let eta = if sigma == 0.0
            || third_central.abs() < ZERO_SKEW_TOL * 1f64.max(m1.abs().powi(3))
        {
            0.0
        } else {
            third_central / (sigma * sigma * sigma)
        };
        Self {
            m1,
            m2,
            m3,
            mu: m1,
            sigma,
            eta,
        }
    }

    /// Summary from mean, variance and third central moment.
    pub fn from_central(mu: f64, variance: f64, third_central: f64) -> Result<Self> {
        let scale = (mu * mu).max(f64::MIN_POSITIVE);
        if variance < -NEGATIVE_VARIANCE_TOL * scale {
            return Err(Error::DegenerateBasket { variance });
        }
        let sigma = variance.max(0.0).sqrt();
        let eta = if sigma == 0.0 {
            0.0
        } else {
            let eta = third_central / (sigma * sigma * sigma);
            if eta.abs() < ZERO_SKEW_TOL {
                0.0
            } else {
                eta
            }
        };
        Ok(Self::from_summary(mu, sigma, eta))
    }

    /// Summary from (mean, stdev, skewness), filling in the raw moments.
    pub fn from_summary(mu: f64, sigma: f64, eta: f64) -> Self {
        let m2 = sigma * sigma + mu * mu;
        let m3 = eta * sigma.powi(3) + 3.0 * mu * m2 - 2.0 * mu.powi(3);
        Self {
            m1: mu,
            m2,
            m3,
            mu,
            sigma,
            eta,
        }
    }

    /// `false` for a deterministic basket, where skewness has no meaning.
    pub fn skew_defined(&self) -> bool {
        self.sigma > 0.0
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Summary from exactly centred sums: `b_i` are the term means, `pair(i, j)`
/// is `ln E[X_i X_j]` and `triple(i, j, k)` is `ln E[X_i X_j X_k]` for the
/// unit-mean factors `X_i`.
fn central_summary<P, Q>(b: &[f64], pair: P, triple: Q) -> Result<MomentSummary>
where
    P: Fn(usize, usize) -> Result<f64>,
    Q: Fn(usize, usize, usize) -> Result<f64>,
{
    let n = b.len();
    let mut mean = CompensatedSum::default();
    let mut var = CompensatedSum::default();
    let mut k3 = CompensatedSum::default();
    let mut e = vec![vec![0.0; n]; n];
    for i in 0..n {
        mean.add(b[i]);
        for j in 0..n {
            e[i][j] = pair(i, j)?.exp_m1();
            var.add(b[i] * b[j] * e[i][j]);
        }
    }
    for i in 0..n {
        for j in 0..n {
            let bij = b[i] * b[j];
            for k in 0..n {
                let central = triple(i, j, k)?.exp_m1() - e[i][j] - e[i][k] - e[j][k];
                k3.add(bij * b[k] * central);
            }
        }
    }
    MomentSummary::from_central(mean.value(), var.value(), k3.value())
}

/// Moments of `B(T) = sum w_i S_i(0) exp((r - sigma_i^2/2) T + sigma_i sqrt(T) N_i)`.
pub fn basket_moments_lognormal(spec: &BasketSpec) -> Result<MomentSummary> {
    spec.validate()?;
    let n = spec.len();
    let t = spec.horizon;
    let growth = (spec.rate * t).exp();
    let b: Vec<f64> = (0..n).map(|i| growth * spec.weights[i] * spec.spots[i]).collect();
    central_summary(
        &b,
        |i, j| Ok(cross(spec, i, j, t)),
        |i, j, k| Ok(cross(spec, i, j, t) + cross(spec, i, k, t) + cross(spec, j, k, t)),
    )
}

/// Largest MGF argument that [`basket_moments_mixture`] evaluates.
pub fn max_mixture_argument(spec: &BasketSpec) -> f64 {
    let n = spec.len();
    let t = spec.horizon;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let arg = mixture_argument3(spec, i, j, k, t);
                worst = worst.max(arg);
            }
        }
    }
    worst
}

#[inline]
fn half_var(spec: &BasketSpec, i: usize, t: f64) -> f64 {
    0.5 * spec.vols[i] * spec.vols[i] * t
}

#[inline]
fn cross(spec: &BasketSpec, i: usize, j: usize, t: f64) -> f64 {
    spec.rho(i, j) * spec.vols[i] * spec.vols[j] * t
}

#[inline]
fn mixture_argument3(spec: &BasketSpec, i: usize, j: usize, k: usize, t: f64) -> f64 {
    half_var(spec, i, t)
        + half_var(spec, j, t)
        + half_var(spec, k, t)
        + cross(spec, i, j, t)
        + cross(spec, i, k, t)
        + cross(spec, j, k, t)
}

/// Moments of the basket under a common time change with MGF `phi`:
/// `B(T) = sum w_i S_i(0) / phi(sigma_i^2 T/2) * exp(rT + sigma_i sqrt(T Y) N_i)`.
///
/// Every MGF evaluation is checked against the law's domain bound; the first
/// offending argument is reported.
pub fn basket_moments_mixture(spec: &BasketSpec, law: &MixingLaw) -> Result<MomentSummary> {
    spec.validate()?;
    let n = spec.len();
    let t = spec.horizon;
    law.check_argument(max_mixture_argument(spec))?;
    let growth = (spec.rate * t).exp();
    let b: Vec<f64> = (0..n).map(|i| growth * spec.weights[i] * spec.spots[i]).collect();
    let lh: Vec<f64> = (0..n)
        .map(|i| law.log_mgf_checked(half_var(spec, i, t)))
        .collect::<Result<_>>()?;
    central_summary(
        &b,
        |i, j| {
            let arg = half_var(spec, i, t) + half_var(spec, j, t) + cross(spec, i, j, t);
            Ok(law.log_mgf_checked(arg)? - lh[i] - lh[j])
        },
        |i, j, k| Ok(law.log_mgf_checked(mixture_argument3(spec, i, j, k, t))? - lh[i] - lh[j] - lh[k]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::builtin_law;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn single_lognormal() {
        let spec = BasketSpec::single(100.0, 0.2, 0.0, 1.0, 100.0).unwrap();
        let ms = basket_moments_lognormal(&spec).unwrap();
        assert!(rel(ms.m1, 100.0) < 1e-15);
        assert!(rel(ms.m2, 1e4 * 0.04f64.exp()) < 1e-14);
        assert!(rel(ms.m3, 1e6 * 0.12f64.exp()) < 1e-14);
    }

    #[test]
    fn deterministic_basket() {
        let spec =
            BasketSpec::pair([0.5, 2.0], [100.0, 30.0], [0.0, 0.0], 0.3, 0.05, 2.0, 0.0).unwrap();
        let ms = basket_moments_lognormal(&spec).unwrap();
        assert_eq!(ms.sigma, 0.0);
        assert!(!ms.skew_defined());
        assert_eq!(ms.eta, 0.0);
        assert!(rel(ms.m1, 110.0 * 0.1f64.exp()) < 1e-15);
    }

    #[test]
    fn scenario3_mean_is_closed_form() {
        let spec =
            BasketSpec::pair([0.7, 0.3], [110.0, 90.0], [0.3, 0.2], 0.9, 0.03, 1.0, 104.0).unwrap();
        let ms = basket_moments_lognormal(&spec).unwrap();
        assert!(rel(ms.mu, 104.0 * 0.03f64.exp()) < 1e-15);
    }

    #[test]
    fn point_mass_reduces_to_lognormal() {
        let law = builtin_law("pointmass").unwrap();
        let spec =
            BasketSpec::pair([-1.0, 1.0], [100.0, 120.0], [0.2, 0.3], 0.9, 0.03, 1.5, 16.0).unwrap();
        let a = basket_moments_lognormal(&spec).unwrap();
        let b = basket_moments_mixture(&spec, &law).unwrap();
        assert!(rel(b.m1, a.m1) < 1e-12);
        assert!(rel(b.m2, a.m2) < 1e-12);
        assert!(rel(b.m3, a.m3) < 1e-12);
    }

    #[test]
    fn mixture_mean_ignores_law() {
        let spec = BasketSpec::single(100.0, 0.4, 0.03, 1.0, 100.0).unwrap();
        for name in ["exp1", "gamma22", "ig12"] {
            let ms = basket_moments_mixture(&spec, &builtin_law(name).unwrap()).unwrap();
            assert!(rel(ms.m1, 100.0 * 0.03f64.exp()) < 1e-15, "{name}");
        }
    }

    #[test]
    fn mixture_domain_error_names_argument() {
        // 9/2 * 0.6^2 = 1.62 > 1
        let spec = BasketSpec::single(100.0, 0.6, 0.0, 1.0, 100.0).unwrap();
        let law = builtin_law("exp1").unwrap();
        match basket_moments_mixture(&spec, &law) {
            Err(Error::MgfDomain { argument, bound, .. }) => {
                assert!((argument - 1.62).abs() < 1e-12);
                assert_eq!(bound, 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn summary_round_trip() {
        let ms = MomentSummary::from_summary(3.0, 2.0, 2.0);
        let back = MomentSummary::from_raw(ms.m1, ms.m2, ms.m3).unwrap();
        assert!(rel(back.sigma, 2.0) < 1e-14);
        assert!(rel(back.eta, 2.0) < 1e-13);
    }

    #[test]
    fn negative_variance_rejected() {
        assert!(matches!(
            MomentSummary::from_raw(10.0, 90.0, 0.0),
            Err(Error::DegenerateBasket { .. })
        ));
        // within tolerance: clamped
        let ms = MomentSummary::from_raw(10.0, 100.0 - 1e-9, 1000.0).unwrap();
        assert_eq!(ms.sigma, 0.0);
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let mut s = CompensatedSum::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }
}
