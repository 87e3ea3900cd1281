//! Moment matching of `c (exp(s sqrt(Y) N + m) + tau)` for a time-changed basket.
//!
//! With `x = s^2` the skewness of the approximant depends on `x` only through
//! MGF values of `Y`:
//!
//! ```text
//! skew(x) = (phi(9x/2) - 3 phi(x/2) phi(2x) + 2 phi(x/2)^3) / (phi(2x) - phi(x/2)^2)^(3/2)
//! ```
//!
//! and calibration reduces to the scalar equation `skew(x) = |eta|`, solved
//! by a geometric scan for a sign change followed by Brent refinement.
//! Dividing numerator and denominator by `phi(x/2)^3` turns the ratio into
//! `(expm1(b) - 3 expm1(a)) / expm1(a)^(3/2)` with log-MGF differences `a`,
//! `b`, which stays accurate down to `x ~ 1e-12`.

use crate::calibrate_lognormal::{Sign, ETA_MIN};
use crate::error::{Error, Result};
use crate::law::MixingLaw;
use crate::moments::MomentSummary;
use crate::roots::brent;

const GRID_POINTS: usize = 256;
const GRID_START: f64 = 1e-12;
/// Scan ceiling when the law's MGF is finite everywhere.
const UNBOUNDED_GRID_END: f64 = 50.0;
const ROOT_FTOL: f64 = 1e-12;

/// Calibrated mixture approximant.
#[derive(Debug, Clone)]
pub struct MixtureParams {
    pub c: Sign,
    pub s: f64,
    pub m: f64,
    pub tau: f64,
    /// `x = s^2`, the root of the skewness equation.
    pub x: f64,
    pub law: MixingLaw,
    /// Notes from the root search (e.g. several sign changes found).
    pub diagnostics: Vec<String>,
}

/// Root of the skewness equation with search diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureShape {
    pub x: f64,
    /// Normalized residual `skew(x) - |eta|` at the returned root.
    pub residual: f64,
    pub sign_changes: usize,
}

struct LogMgfs {
    half: f64,
    excess_2: f64,
    excess_3: f64,
}

fn log_mgfs(x: f64, law: &MixingLaw) -> LogMgfs {
    let half = law.log_mgf(0.5 * x);
    let two = law.log_mgf(2.0 * x);
    let nine = law.log_mgf(4.5 * x);
    LogMgfs {
        half,
        excess_2: two - 2.0 * half,
        excess_3: nine - 3.0 * half,
    }
}

/// Skewness of `exp(sqrt(x Y) N)` as a function of `x`; NaN where the
/// variance term vanishes.
pub fn approximant_skewness(x: f64, law: &MixingLaw) -> f64 {
    let l = log_mgfs(x, law);
    let var = l.excess_2.exp_m1();
    if !(var > 0.0) || !var.is_finite() {
        return f64::NAN;
    }
    (l.excess_3.exp_m1() - 3.0 * var) / (var * var.sqrt())
}

/// Upper end of the admissible `x` range: `9x/2` must stay below the MGF bound.
pub fn shape_upper_bound(law: &MixingLaw) -> f64 {
    let bound = law.mgf_domain_bound();
    if bound.is_finite() {
        (2.0 / 9.0) * bound
    } else {
        f64::INFINITY
    }
}

/// Smallest positive root `x` of `skew(x) = |eta|`.
pub fn solve_mixture_shape(eta: f64, law: &MixingLaw) -> Result<f64> {
    solve_mixture_shape_detailed(eta, law).map(|s| s.x)
}

/// [`solve_mixture_shape`] with residual and sign-change count.
pub fn solve_mixture_shape_detailed(eta: f64, law: &MixingLaw) -> Result<MixtureShape> {
    let bound = law.mgf_domain_bound();
    if !(bound > 0.0) {
        return Err(Error::EmptyDomain {
            law: law.label().to_string(),
        });
    }
    if !(eta.abs() > ETA_MIN) {
        return Err(Error::DegenerateSkew { eta });
    }
    let target = eta.abs();
    let end = if bound.is_finite() {
        (2.0 / 9.0) * bound * (1.0 - 1e-9)
    } else {
        UNBOUNDED_GRID_END
    };
    let g = |x: f64| approximant_skewness(x, law) - target;

    let ratio = (end / GRID_START).powf(1.0 / (GRID_POINTS - 1) as f64);
    let mut grid = Vec::with_capacity(GRID_POINTS);
    let mut x = GRID_START;
    for k in 0..GRID_POINTS {
        let xk = if k == GRID_POINTS - 1 { end } else { x };
        grid.push((xk, g(xk)));
        x *= ratio;
    }

    let finite: Vec<(f64, f64)> = grid.iter().copied().filter(|(_, v)| v.is_finite()).collect();
    let mut brackets = finite
        .windows(2)
        .filter(|w| w[0].1 == 0.0 || w[0].1.signum() != w[1].1.signum())
        .map(|w| (w[0], w[1]));
    let first = brackets.next();
    let sign_changes = first.map_or(0, |_| 1 + brackets.count());

    let Some(((lo, glo), (hi, ghi))) = first else {
        let (g_min, g_max) = finite
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (_, v)| (a.min(*v), b.max(*v)));
        return Err(Error::NoRoot {
            law: law.label().to_string(),
            eta: target,
            g_min,
            g_max,
        });
    };
    let root = if glo == 0.0 {
        lo
    } else if ghi == 0.0 {
        hi
    } else {
        brent(g, lo, hi, 0.0, ROOT_FTOL, 200)
            .map(|r| r.x)
            .unwrap_or(0.5 * (lo + hi))
    };
    Ok(MixtureShape {
        x: root,
        residual: g(root),
        sign_changes,
    })
}

/// Parameters `(c, s, m, tau)` matching the first three moments of `ms`.
pub fn calibrate_mixture(ms: &MomentSummary, law: &MixingLaw) -> Result<MixtureParams> {
    if !(ms.sigma > 0.0) {
        return Err(Error::ZeroVariance);
    }
    if !(ms.eta.abs() > ETA_MIN) {
        return Err(Error::DegenerateSkew { eta: ms.eta });
    }
    let shape = solve_mixture_shape_detailed(ms.eta, law)?;
    let x = shape.x;
    law.check_argument(4.5 * x)?;
    let l = log_mgfs(x, law);
    // (phi(2x) - phi(x/2)^2) / phi(x/2)^2
    let rel_var = l.excess_2.exp_m1();
    let c = Sign::of(ms.eta);
    let m = 0.5 * (2.0 * ms.sigma.ln() - rel_var.ln() - 2.0 * l.half);
    let tau = c.value() * ms.mu - ms.sigma / rel_var.sqrt();
    let mut diagnostics = Vec::new();
    if shape.sign_changes > 1 {
        diagnostics.push(format!(
            "skewness equation changes sign {} times on the scan grid; smallest root taken",
            shape.sign_changes
        ));
    }
    Ok(MixtureParams {
        c,
        s: x.sqrt(),
        m,
        tau,
        x,
        law: law.clone(),
        diagnostics,
    })
}

/// Closed-form moments of `c (exp(s sqrt(Y) N + m) + tau)`.
pub fn approximant_moments_mixture(p: &MixtureParams) -> MomentSummary {
    let x = p.s * p.s;
    let e1 = (p.m + p.law.log_mgf(0.5 * x)).exp();
    let e2 = (2.0 * p.m + p.law.log_mgf(2.0 * x)).exp();
    let e3 = (3.0 * p.m + p.law.log_mgf(4.5 * x)).exp();
    let t = p.tau;
    let c = p.c.value();
    MomentSummary::summarize(
        c * (e1 + t),
        e2 + 2.0 * t * e1 + t * t,
        c * (e3 + 3.0 * t * e2 + 3.0 * t * t * e1 + t * t * t),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibrate_lognormal::{calibrate_lognormal, solve_cubic_skew};
    use crate::law::builtin_law;

    #[test]
    fn point_mass_matches_cardano() {
        let law = builtin_law("pointmass").unwrap();
        let x = solve_mixture_shape(2.0, &law).unwrap();
        assert!((x - solve_cubic_skew(2.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn exp1_root_inside_domain() {
        let law = builtin_law("exp1").unwrap();
        for eta in [0.1, 1.0, 10.0, 100.0] {
            let x = solve_mixture_shape(eta, &law).unwrap();
            assert!(x > 0.0 && x < 2.0 / 9.0, "eta={eta} x={x}");
        }
    }

    #[test]
    fn unshifted_first_moment() {
        let p = MixtureParams {
            c: Sign::Plus,
            s: 0.1f64.sqrt(),
            m: 0.0,
            tau: 0.0,
            x: 0.1,
            law: builtin_law("exp1").unwrap(),
            diagnostics: vec![],
        };
        let ms = approximant_moments_mixture(&p);
        assert!((ms.m1 - 1.0 / 0.95).abs() < 1e-14);
    }

    #[test]
    fn point_mass_calibration_matches_lognormal() {
        let law = builtin_law("pointmass").unwrap();
        let ms = MomentSummary::from_summary(12.0, 4.0, 0.8);
        let a = calibrate_lognormal(&ms).unwrap();
        let b = calibrate_mixture(&ms, &law).unwrap();
        assert!((b.x - a.x.ln()).abs() < 1e-10);
        assert!((b.s - a.s).abs() < 1e-8);
        assert!((b.m - a.m).abs() < 1e-8);
        assert!((b.tau - a.tau).abs() < 1e-8 * a.tau.abs().max(1.0));
    }

    #[test]
    fn sign_flip_keeps_shape() {
        let law = builtin_law("gamma22").unwrap();
        let pos = calibrate_mixture(&MomentSummary::from_summary(3.0, 2.0, 1.2), &law).unwrap();
        let neg = calibrate_mixture(&MomentSummary::from_summary(-3.0, 2.0, -1.2), &law).unwrap();
        assert_eq!(pos.c, Sign::Plus);
        assert_eq!(neg.c, Sign::Minus);
        assert_eq!(pos.x, neg.x);
        assert_eq!(pos.m, neg.m);
        assert!((pos.tau - neg.tau).abs() < 1e-12);
    }

    #[test]
    fn no_root_and_empty_domain() {
        // the MGF domain is so narrow that the skewness never exceeds ~1e-3
        let law = MixingLaw::new("narrow", |s| s.exp(), 1e-6).with_log_mgf(|s| s);
        match solve_mixture_shape(1.0, &law) {
            Err(Error::NoRoot { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let empty = MixingLaw::new("empty", |_| 1.0, 0.0);
        assert!(matches!(
            solve_mixture_shape(1.0, &empty),
            Err(Error::EmptyDomain { .. })
        ));
    }

    #[test]
    fn skewness_is_stable_for_tiny_x() {
        // point mass: skew(x) = sqrt(e^x - 1) (e^x + 2), about 3 sqrt(x);
        // the numerator cancels to O(x^2) so accuracy degrades like eps / x
        let law = builtin_law("pointmass").unwrap();
        for (x, tol) in [(1e-12, 1e-3), (1e-9, 1e-6), (1e-6, 1e-9)] {
            let v = approximant_skewness(x, &law);
            let exact = x.exp_m1().sqrt() * (x.exp() + 2.0);
            assert!((v / exact - 1.0).abs() < tol, "x={x}: {v} vs {exact}");
        }
    }
}
