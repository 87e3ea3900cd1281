use basketmm::calibrate_lognormal::{
    approximant_moments_lognormal, cubic_residual, solve_cubic_skew,
};
use basketmm::calibrate_mixture::approximant_moments_mixture;
use basketmm::greeks::{finite_difference_greeks, greeks_from_moments};
use basketmm::pricing::{black_scholes_call, price_from_moments, PricingCase};
use basketmm::scenario::ScenarioFile;
use basketmm::{
    basket_moments_lognormal, basket_moments_mixture, builtin_law, calibrate_lognormal,
    calibrate_mixture, price_basket, BasketSpec, Error, MixingLaw, MomentSummary, Sign,
};
use proptest::prelude::*;

const LAWS: [&str; 3] = ["exp1", "gamma22", "ig12"];

fn close(a: f64, b: f64, rel: f64, floor: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(floor)
}

/// Raw moments agree relative to the moment itself or to `scale^k`.
fn raw_moments_match(a: &MomentSummary, b: &MomentSummary, rel: f64, scale: f64) -> bool {
    close(a.m1, b.m1, rel, scale) && close(a.m2, b.m2, rel, scale.powi(2)) && close(a.m3, b.m3, rel, scale.powi(3))
}

fn summary() -> impl Strategy<Value = MomentSummary> {
    (-200.0..200.0f64, 0.1..100.0f64, 0.01..10.0f64, any::<bool>()).prop_map(
        |(mu, sigma, eta, neg)| MomentSummary::from_summary(mu, sigma, if neg { -eta } else { eta }),
    )
}

/// Random correlation `D^-1/2 A A^T D^-1/2` from a random factor `A`.
fn correlation(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(-1.0..1.0f64, n * n).prop_map(move |a| {
        let mut c = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                c[i][j] = (0..n).map(|k| a[i * n + k] * a[j * n + k]).sum::<f64>();
            }
            c[i][i] += 0.05;
        }
        let d: Vec<f64> = (0..n).map(|i| c[i][i].sqrt()).collect();
        for i in 0..n {
            for j in 0..n {
                c[i][j] = if i == j { 1.0 } else { c[i][j] / (d[i] * d[j]) };
            }
        }
        c
    })
}

fn basket() -> impl Strategy<Value = BasketSpec> {
    (1usize..=4).prop_flat_map(|n| {
        (
            prop::collection::vec(prop_oneof![-1.5..-0.1f64, 0.1..1.5f64], n),
            prop::collection::vec(50.0..150.0f64, n),
            prop::collection::vec(0.05..0.5f64, n),
            correlation(n),
            0.0..0.06f64,
            0.25..2.0f64,
            0.7..1.3f64,
        )
            .prop_map(|(w, s, v, c, r, t, moneyness)| {
                let b0: f64 = w.iter().zip(&s).map(|(a, b)| a * b).sum();
                let scale: f64 = w.iter().zip(&s).map(|(a, b)| (a * b).abs()).sum();
                let strike = b0 + (moneyness - 1.0) * scale;
                BasketSpec::new(w, s, v, c, r, t, strike).expect("valid random basket")
            })
    })
}

/// Basket moments, or `None` when the mixing law's MGF diverges for this basket.
fn moments_if_finite(spec: &BasketSpec, law: Option<&MixingLaw>) -> Option<MomentSummary> {
    match law {
        None => Some(basket_moments_lognormal(spec).unwrap()),
        Some(l) => match basket_moments_mixture(spec, l) {
            Ok(ms) => calibrate_mixture(&ms, l).is_ok().then_some(ms),
            Err(e) if matches!(e.root(), Error::MgfDomain { .. }) => None,
            Err(e) => panic!("{e}"),
        },
    }
}

/// Shift `tau` of the log-normal calibration, signed as a strike boundary.
fn strike_boundary(ms: &MomentSummary) -> f64 {
    let p = calibrate_lognormal(ms).unwrap();
    match p.c {
        Sign::Plus => p.tau,
        Sign::Minus => -p.tau,
    }
}

fn bisect_cubic(eta: f64) -> f64 {
    let f = |x: f64| x * x * x + 3.0 * x * x - 4.0 - eta * eta;
    let (mut lo, mut hi) = (1.0, 1.0 + eta * eta);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn lognormal_moment_match_round_trip(ms in summary()) {
        let p = calibrate_lognormal(&ms).unwrap();
        let back = approximant_moments_lognormal(&p);
        // the approximant's raw moments sum terms of size |tau|^k
        let scale = ms.mu.abs() + ms.sigma + p.tau.abs();
        prop_assert!(raw_moments_match(&ms, &back, 1e-9, scale), "{ms:?} -> {back:?}");
    }

    #[test]
    fn cubic_root_has_small_residual(eta in -10.0..10.0f64) {
        let x = solve_cubic_skew(eta);
        prop_assert!(x >= 1.0);
        prop_assert!(cubic_residual(x, eta).abs() <= 1e-10 * (1.0 + eta * eta));
    }

    #[test]
    fn cardano_agrees_with_bisection(eta in -10.0..10.0f64) {
        prop_assert!((solve_cubic_skew(eta) - bisect_cubic(eta)).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mixture_moment_match_round_trip(ms in summary(), law in 0usize..3) {
        let law = builtin_law(LAWS[law]).unwrap();
        let p = calibrate_mixture(&ms, &law).unwrap();
        let back = approximant_moments_mixture(&p);
        prop_assert!(raw_moments_match(&ms, &back, 1e-6, ms.mu.abs() + ms.sigma), "{ms:?} -> {back:?}");
    }

    #[test]
    fn single_asset_is_black_scholes(
        spot in 10.0..500.0f64,
        vol in 0.05..0.8f64,
        rate in 0.0..0.08f64,
        horizon in 0.1..3.0f64,
        moneyness in 0.5..1.5f64,
    ) {
        let strike = moneyness * spot;
        let spec = BasketSpec::single(spot, vol, rate, horizon, strike).unwrap();
        let ours = price_basket(&spec, None).unwrap().price;
        let bs = black_scholes_call(spot, strike, vol, rate, horizon);
        prop_assert!(close(ours, bs, 1e-8, 1e-8 * spot), "{ours} vs {bs}");
    }

    #[test]
    fn point_mass_law_reduces_to_lognormal(spec in basket()) {
        let y1 = builtin_law("pointmass").unwrap();
        let a = basket_moments_lognormal(&spec).unwrap();
        let b = basket_moments_mixture(&spec, &y1).unwrap();
        prop_assert!(raw_moments_match(&a, &b, 1e-12, a.mu.abs() + a.sigma));
        let pl = price_basket(&spec, None).unwrap().price;
        let pm = price_basket(&spec, Some(&y1)).unwrap().price;
        prop_assert!(close(pl, pm, 1e-6, 1e-6 * (a.mu.abs() + a.sigma)), "{pl} vs {pm}");
    }

    #[test]
    fn analytic_greeks_match_finite_differences(spec in basket()) {
        let ms = basket_moments_lognormal(&spec).unwrap();
        prop_assume!(ms.eta.abs() > 0.05);
        let boundary = strike_boundary(&ms);
        prop_assume!((spec.strike - boundary).abs() > 1e-3 * ms.sigma);
        let price = price_basket(&spec, None).unwrap().price;
        // far out of the money the bumped prices differ only by rounding
        prop_assume!(price > 1e-6 * ms.sigma);
        let g = greeks_from_moments(&ms, spec.strike, spec.rate, spec.horizon).unwrap();
        let fd = finite_difference_greeks(&ms, spec.strike, spec.rate, spec.horizon, 1e-5).unwrap();
        let analytic = [g.dp_dmu, g.dp_dsigma, g.dp_deta];
        let scale = [1.0, 1.0, ms.sigma];
        for k in 0..3 {
            prop_assert!(
                close(analytic[k], fd[k], 1e-4, 1e-3 * scale[k]),
                "component {k}: {} vs {} ({:?})", analytic[k], fd[k], g.case
            );
        }
    }

    #[test]
    fn price_is_nonincreasing_in_strike(spec in basket(), law in 0usize..4) {
        let law = LAWS.get(law).map(|n| builtin_law(n).unwrap());
        let ms = moments_if_finite(&spec, law.as_ref());
        prop_assume!(ms.is_some());
        let ms = ms.unwrap();
        let boundary = strike_boundary(&ms);
        let lo = boundary.min(ms.mu) - 3.0 * ms.sigma;
        let hi = boundary.max(ms.mu) + 3.0 * ms.sigma;
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let k = lo + (hi - lo) * i as f64 / 99.0;
            let p = price_from_moments(&ms, k, spec.rate, spec.horizon, law.as_ref()).unwrap().price;
            prop_assert!(p >= 0.0);
            prop_assert!(p <= prev + 1e-10 * (1.0 + prev.abs()), "K={k}: {p} > {prev}");
            prev = p;
        }
    }

    #[test]
    fn price_is_continuous_at_the_case_boundary(spec in basket(), law in 0usize..4) {
        let law = LAWS.get(law).map(|n| builtin_law(n).unwrap());
        let ms = moments_if_finite(&spec, law.as_ref());
        prop_assume!(ms.is_some());
        let ms = ms.unwrap();
        prop_assume!(ms.eta.abs() > 1e-6);
        let boundary = match &law {
            None => strike_boundary(&ms),
            Some(l) => {
                let p = calibrate_mixture(&ms, l).unwrap();
                p.c.value() * p.tau
            }
        };
        let delta = 1e-11 * (1.0 + boundary.abs());
        let price = |k: f64| price_from_moments(&ms, k, spec.rate, spec.horizon, law.as_ref()).unwrap();
        let below = price(boundary - delta);
        let above = price(boundary + delta);
        prop_assert_ne!(below.case, above.case);
        prop_assert!(
            (below.price - above.price).abs() <= 1e-8 * below.price.max(1.0),
            "{} vs {}", below.price, above.price
        );
    }
}

#[test]
fn greeks_are_constant_in_the_degenerate_branches() {
    let ms = MomentSummary::from_summary(10.0, 2.0, 0.5);
    let boundary = strike_boundary(&ms);
    let (rate, horizon) = (0.03, 1.0);
    let g = greeks_from_moments(&ms, boundary - 1.0, rate, horizon).unwrap();
    assert_eq!(g.case, PricingCase::PlusStrikeAtOrBelowShift);
    assert!(((rate * horizon).exp() * g.dp_dmu - 1.0).abs() < 1e-15);
    assert_eq!((g.dp_dsigma, g.dp_deta), (0.0, 0.0));

    let neg = MomentSummary::from_summary(10.0, 2.0, -0.5);
    let g = greeks_from_moments(&neg, strike_boundary(&neg) + 1.0, rate, horizon).unwrap();
    assert_eq!(g.case, PricingCase::MinusStrikeAtOrAboveShift);
    assert_eq!((g.dp_dmu, g.dp_dsigma, g.dp_deta), (0.0, 0.0, 0.0));
}

#[test]
fn cubic_root_is_increasing_in_absolute_skewness() {
    let grid: Vec<f64> = (1..=1000).map(|i| i as f64 * 0.01).collect();
    for pair in grid.windows(2) {
        assert!(solve_cubic_skew(pair[1]) > solve_cubic_skew(pair[0]));
        assert_eq!(solve_cubic_skew(-pair[0]), solve_cubic_skew(pair[0]));
    }
}

#[test]
fn scenario_file_round_trip_preserves_baskets() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/table2.toml")).unwrap();
    let file = ScenarioFile::parse(&text).unwrap();
    let back = ScenarioFile::parse(&file.emit().unwrap()).unwrap();
    for (a, b) in file.scenarios.iter().zip(&back.scenarios) {
        assert_eq!(a.basket().unwrap(), b.basket().unwrap());
        assert_eq!(a.strikes().unwrap(), b.strikes().unwrap());
    }
}
