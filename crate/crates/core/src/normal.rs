//! Standard normal distribution helpers.
//!
//! The CDF goes through the complementary error function so that both tails
//! keep full relative precision; `cdf(-40.0)` is a tiny positive number rather
//! than a rounded zero from `1 - cdf(40.0)`.

use statrs::function::erf::{erfc, erfc_inv};
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

/// Standard normal CDF.
#[inline]
pub fn cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal density.
#[inline]
pub fn pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Inverse of the standard normal CDF on the open unit interval.
#[inline]
pub fn inv_cdf(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let z = -SQRT_2 * erfc_inv(2.0 * p);
    // one Newton step against the erfc-based CDF
    let density = pdf(z);
    if density > 0.0 {
        z - (cdf(z) - p) / density
    } else {
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetry_and_center() {
        assert_eq!(cdf(0.0), 0.5);
        for z in [0.1, 1.0, 2.5, 6.0] {
            assert!((cdf(z) + cdf(-z) - 1.0).abs() < 1e-15);
        }
        assert!((pdf(0.0) - 0.398_942_280_401_432_7).abs() < 1e-16);
    }

    #[test]
    fn tails_saturate() {
        assert_eq!(cdf(f64::INFINITY), 1.0);
        assert_eq!(cdf(f64::NEG_INFINITY), 0.0);
        assert!(cdf(-30.0) > 0.0);
    }

    #[test]
    fn inverse_round_trip() {
        for p in [1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9] {
            let z = inv_cdf(p);
            assert!((cdf(z) / p - 1.0).abs() <= 1e-12, "p={p}: {}", cdf(z) / p - 1.0);
        }
    }
}
