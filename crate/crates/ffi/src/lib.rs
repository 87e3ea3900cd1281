//! C interface to `basketmm`.
//!
//! Baskets and mixing laws are opaque heap handles created by
//! `bm_basket_new` / `bm_law_builtin` and released with the matching
//! `*_free` function. Every fallible call returns a [`BmStatus`]; on failure
//! `bm_last_error_message` describes the error for the calling thread.
//! Output structs are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use basketmm::calibrate_lognormal::solve_cubic_skew;
use basketmm::greeks::greeks_from_moments;
use basketmm::moments::{basket_moments_lognormal, basket_moments_mixture};
use basketmm::montecarlo::{mc_prices, McConfig};
use basketmm::pricing::{price_basket, PricingCase, PricingMethod};
use basketmm::report::streams_for;
use basketmm::{builtin_law, BasketSpec, Error, MixingLaw};

/// Opaque basket handle.
pub struct BmBasket {
    spec: BasketSpec,
}

/// Opaque mixing-law handle.
pub struct BmLaw {
    law: MixingLaw,
}

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidBasket = 3,
    NotPositiveSemidefinite = 4,
    DegenerateBasket = 5,
    DomainError = 6,
    NoRoot = 7,
    NumericalFailure = 8,
    UnknownLaw = 9,
    CaseBoundary = 10,
    Panic = 11,
}

/// Mean, standard deviation, skewness and raw moments of the basket.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BmMoments {
    pub mu: f64,
    pub sigma: f64,
    pub eta: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

/// Pricing method codes reported in `BmPrice`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BmMethod {
    ClosedFormLognormal = 0,
    MixtureQuadrature = 1,
    NormalFallback = 2,
    Deterministic = 3,
    BlackScholes = 4,
}

/// Closed-form price. `case_index` is 1..4 for the pricing branch
/// (`c=+1,K<=tau`, `c=+1,K>tau`, `c=-1,K>=-tau`, `c=-1,K<-tau`) or 0 when
/// no branch applies.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BmPrice {
    pub price: f64,
    pub method: BmMethod,
    pub case_index: i32,
    /// Quadrature error estimate, or 0 when no quadrature was run.
    pub quad_error: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BmMcResult {
    pub mean: f64,
    pub std_error: f64,
    pub paths: u64,
}

/// Sensitivities to (mean, stdev, skewness) of the log-normal approximant price.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BmGreeks {
    pub dp_dmu: f64,
    pub dp_dsigma: f64,
    pub dp_deta: f64,
    pub dx_deta: f64,
    pub case_index: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> BmStatus {
    match err.root() {
        Error::InvalidBasket(_) | Error::InvalidCorrelation(_) => BmStatus::InvalidBasket,
        Error::NotPsd { .. } => BmStatus::NotPositiveSemidefinite,
        Error::DegenerateBasket { .. } | Error::ZeroVariance | Error::DegenerateSkew { .. } => {
            BmStatus::DegenerateBasket
        }
        Error::MgfDomain { .. } | Error::EmptyDomain { .. } | Error::LawCapability { .. } => {
            BmStatus::DomainError
        }
        Error::NoRoot { .. } => BmStatus::NoRoot,
        Error::UnknownLaw(_) => BmStatus::UnknownLaw,
        Error::CaseBoundary { .. } | Error::WrongBranch => BmStatus::CaseBoundary,
        Error::QuadratureNonConvergence { .. } | Error::SamplerFailure { .. } => {
            BmStatus::NumericalFailure
        }
        Error::InvalidConfig(_) | Error::EmptyCases | Error::ZeroBenchmark(_) => {
            BmStatus::InvalidArgument
        }
        Error::Context { .. } => unreachable!("root() strips context"),
    }
}

/// Runs `f`, mapping errors and panics to a status and the thread's message.
fn guard<F>(f: F) -> BmStatus
where
    F: FnOnce() -> Result<(), (BmStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            BmStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            BmStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (BmStatus, String) {
    (status_of(&e), e.to_string())
}

fn null_err(what: &str) -> (BmStatus, String) {
    (BmStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn array<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], (BmStatus, String)> {
    if p.is_null() {
        return Err(null_err(what));
    }
    Ok(slice::from_raw_parts(p, n))
}

unsafe fn law_ref<'a>(law: *const BmLaw) -> Option<&'a MixingLaw> {
    law.as_ref().map(|l| &l.law)
}

fn case_index(case: Option<PricingCase>) -> i32 {
    match case {
        None => 0,
        Some(PricingCase::PlusStrikeAtOrBelowShift) => 1,
        Some(PricingCase::PlusStrikeAboveShift) => 2,
        Some(PricingCase::MinusStrikeAtOrAboveShift) => 3,
        Some(PricingCase::MinusStrikeBelowShift) => 4,
    }
}

/// Creates a basket of `n` assets. `correlation` is `n * n`, row-major.
///
/// # Safety
/// Array arguments must point to `n` (or `n * n`) readable doubles and
/// `out` to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn bm_basket_new(
    n: usize,
    weights: *const f64,
    spots: *const f64,
    vols: *const f64,
    correlation: *const f64,
    rate: f64,
    horizon: f64,
    strike: f64,
    out: *mut *mut BmBasket,
) -> BmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        if n == 0 {
            return Err((BmStatus::InvalidArgument, "basket needs at least one asset".into()));
        }
        let w = array(weights, n, "weights")?.to_vec();
        let s = array(spots, n, "spots")?.to_vec();
        let v = array(vols, n, "vols")?.to_vec();
        let c = array(correlation, n * n, "correlation")?;
        let corr = c.chunks(n).map(<[f64]>::to_vec).collect();
        let spec = BasketSpec::new(w, s, v, corr, rate, horizon, strike).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(BmBasket { spec }));
        Ok(())
    })
}

/// Releases a basket; null is ignored.
///
/// # Safety
/// `basket` must come from `bm_basket_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bm_basket_free(basket: *mut BmBasket) {
    if !basket.is_null() {
        drop(Box::from_raw(basket));
    }
}

/// Replaces the strike of an existing basket.
///
/// # Safety
/// `basket` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bm_basket_set_strike(basket: *mut BmBasket, strike: f64) -> BmStatus {
    guard(|| {
        let b = basket.as_mut().ok_or_else(|| null_err("basket"))?;
        if !strike.is_finite() {
            return Err((BmStatus::InvalidArgument, format!("strike {strike} is not finite")));
        }
        b.spec.strike = strike;
        Ok(())
    })
}

/// Looks up `exp1`, `gamma22`, `ig12` or `pointmass`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bm_law_builtin(name: *const c_char, out: *mut *mut BmLaw) -> BmStatus {
    guard(|| {
        if name.is_null() {
            return Err(null_err("name"));
        }
        if out.is_null() {
            return Err(null_err("out"));
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| (BmStatus::InvalidArgument, "law name is not UTF-8".to_string()))?;
        let law = builtin_law(name).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(BmLaw { law }));
        Ok(())
    })
}

/// Releases a law; null is ignored.
///
/// # Safety
/// `law` must come from `bm_law_builtin` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bm_law_free(law: *mut BmLaw) {
    if !law.is_null() {
        drop(Box::from_raw(law));
    }
}

/// Basket moments; `law` may be null for the log-normal model.
///
/// # Safety
/// `basket` must be live, `law` null or live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bm_moments(
    basket: *const BmBasket,
    law: *const BmLaw,
    out: *mut BmMoments,
) -> BmStatus {
    guard(|| {
        let b = basket.as_ref().ok_or_else(|| null_err("basket"))?;
        if out.is_null() {
            return Err(null_err("out"));
        }
        let ms = match law_ref(law) {
            None => basket_moments_lognormal(&b.spec),
            Some(l) => basket_moments_mixture(&b.spec, l),
        }
        .map_err(lib_err)?;
        *out = BmMoments {
            mu: ms.mu,
            sigma: ms.sigma,
            eta: ms.eta,
            m1: ms.m1,
            m2: ms.m2,
            m3: ms.m3,
        };
        Ok(())
    })
}

/// Closed-form call price; `law` may be null for the log-normal model.
///
/// # Safety
/// `basket` must be live, `law` null or live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bm_price(
    basket: *const BmBasket,
    law: *const BmLaw,
    out: *mut BmPrice,
) -> BmStatus {
    guard(|| {
        let b = basket.as_ref().ok_or_else(|| null_err("basket"))?;
        if out.is_null() {
            return Err(null_err("out"));
        }
        let r = price_basket(&b.spec, law_ref(law)).map_err(lib_err)?;
        let method = match r.method {
            PricingMethod::ClosedFormLognormal => BmMethod::ClosedFormLognormal,
            PricingMethod::MixtureQuadrature => BmMethod::MixtureQuadrature,
            PricingMethod::NormalFallback => BmMethod::NormalFallback,
            PricingMethod::Deterministic => BmMethod::Deterministic,
            PricingMethod::BlackScholes => BmMethod::BlackScholes,
        };
        *out = BmPrice {
            price: r.price,
            method,
            case_index: case_index(r.case),
            quad_error: r.quad_error.unwrap_or(0.0),
        };
        Ok(())
    })
}

/// Monte-Carlo call price with `paths` paths; `law` may be null.
///
/// # Safety
/// `basket` must be live, `law` null or live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bm_mc_price(
    basket: *const BmBasket,
    law: *const BmLaw,
    paths: u64,
    seed: u64,
    out: *mut BmMcResult,
) -> BmStatus {
    guard(|| {
        let b = basket.as_ref().ok_or_else(|| null_err("basket"))?;
        if out.is_null() {
            return Err(null_err("out"));
        }
        let cfg = McConfig::new(paths, seed).with_streams(streams_for(paths));
        let r = mc_prices(&b.spec, law_ref(law), &[b.spec.strike], &cfg).map_err(lib_err)?[0];
        *out = BmMcResult {
            mean: r.mean,
            std_error: r.std_error,
            paths: r.paths,
        };
        Ok(())
    })
}

/// Analytic Greeks of the log-normal approximant at the basket's strike.
///
/// # Safety
/// `basket` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bm_greeks_lognormal(basket: *const BmBasket, out: *mut BmGreeks) -> BmStatus {
    guard(|| {
        let b = basket.as_ref().ok_or_else(|| null_err("basket"))?;
        if out.is_null() {
            return Err(null_err("out"));
        }
        let ms = basket_moments_lognormal(&b.spec).map_err(lib_err)?;
        let g = greeks_from_moments(&ms, b.spec.strike, b.spec.rate, b.spec.horizon)
            .map_err(lib_err)?;
        *out = BmGreeks {
            dp_dmu: g.dp_dmu,
            dp_dsigma: g.dp_dsigma,
            dp_deta: g.dp_deta,
            dx_deta: g.dx_deta,
            case_index: case_index(Some(g.case)),
        };
        Ok(())
    })
}

/// Real root `x >= 1` of `x^3 + 3x^2 - 4 - eta^2 = 0`.
#[no_mangle]
pub extern "C" fn bm_solve_cubic_skew(eta: f64) -> f64 {
    solve_cubic_skew(eta)
}

/// Message for the last failed call on this thread ("" after a success).
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn bm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn bm_status_name(status: BmStatus) -> *const c_char {
    let s: &'static CStr = match status {
        BmStatus::Ok => c"ok",
        BmStatus::NullPointer => c"null pointer",
        BmStatus::InvalidArgument => c"invalid argument",
        BmStatus::InvalidBasket => c"invalid basket",
        BmStatus::NotPositiveSemidefinite => c"correlation not positive semidefinite",
        BmStatus::DegenerateBasket => c"degenerate basket",
        BmStatus::DomainError => c"mixing-law domain error",
        BmStatus::NoRoot => c"no calibration root",
        BmStatus::NumericalFailure => c"numerical failure",
        BmStatus::UnknownLaw => c"unknown law",
        BmStatus::CaseBoundary => c"strike on case boundary",
        BmStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_error_maps_to_a_status() {
        assert_eq!(status_of(&Error::NoRoot { law: "x".into(), eta: 1.0, g_min: 0.0, g_max: 0.0 }), BmStatus::NoRoot);
        let wrapped = Error::Context {
            context: "ctx".into(),
            source: Box::new(Error::UnknownLaw("q".into())),
        };
        assert_eq!(status_of(&wrapped), BmStatus::UnknownLaw);
    }

    #[test]
    fn guard_catches_panics() {
        assert_eq!(guard(|| panic!("boom")), BmStatus::Panic);
        let msg = unsafe { CStr::from_ptr(bm_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "internal panic");
    }

    #[test]
    fn null_handles_are_reported() {
        let mut m = BmMoments::default();
        let st = unsafe { bm_moments(std::ptr::null(), std::ptr::null(), &mut m) };
        assert_eq!(st, BmStatus::NullPointer);
    }
}
