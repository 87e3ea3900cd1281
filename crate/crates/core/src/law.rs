//! Time-change (mixing) laws for normal variance mixture models.
//!
//! A [`MixingLaw`] describes the marginal law of the normalized business
//! clock `Y`: the terminal log-return of asset `i` is `sigma_i * sqrt(T * Y) * N_i`
//! plus a drift fixed by the martingale condition. At `T = 1` this is the
//! usual `Y_T`. All built-in laws have unit mean.

use std::fmt;
use std::sync::Arc;

use rand::distr::Open01;
use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::normal;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type SamplerFn = Arc<dyn Fn(&mut dyn RngCore) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Marginal {
    Density {
        density: RealFn,
        survival: Option<RealFn>,
    },
    Atom(f64),
    Unknown,
}

/// Law of the time change: MGF, density (or atom), and a sampler.
#[derive(Clone)]
pub struct MixingLaw {
    label: String,
    mgf: RealFn,
    log_mgf: Option<RealFn>,
    bound: f64,
    marginal: Marginal,
    sampler: Option<SamplerFn>,
}

impl fmt::Debug for MixingLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MixingLaw")
            .field("label", &self.label)
            .field("mgf_domain_bound", &self.bound)
            .finish_non_exhaustive()
    }
}

/// Names accepted by [`builtin_law`].
pub const BUILTIN_LAWS: [&str; 4] = ["exp1", "gamma22", "ig12", "pointmass"];

impl MixingLaw {
    /// Custom law from its MGF and the supremum of the MGF's finite domain.
    ///
    /// The MGF only has to be valid on `(-inf, bound)`; arguments at or past
    /// the bound are rejected before the closure is called.
    pub fn new(
        label: impl Into<String>,
        mgf: impl Fn(f64) -> f64 + Send + Sync + 'static,
        mgf_domain_bound: f64,
    ) -> Self {
        Self {
            label: label.into(),
            mgf: Arc::new(mgf),
            log_mgf: None,
            bound: mgf_domain_bound,
            marginal: Marginal::Unknown,
            sampler: None,
        }
    }

    /// Time change concentrated at `value` (the log-normal model when `value = 1`).
    pub fn point_mass(value: f64) -> Self {
        Self::new(format!("pointmass({value})"), move |s| (value * s).exp(), f64::INFINITY)
            .with_log_mgf(move |s| value * s)
            .with_atom(value)
            .with_sampler(move |_| value)
    }

    /// Supplies `ln phi(s)` directly, which keeps the skewness equation accurate
    /// for small arguments.
    pub fn with_log_mgf(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.log_mgf = Some(Arc::new(f));
        self
    }

    pub fn with_density(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.marginal = Marginal::Density {
            density: Arc::new(f),
            survival: None,
        };
        self
    }

    /// Tail probability `P(Y > y)`; requires a density to be set first.
    pub fn with_survival(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        if let Marginal::Density { survival, .. } = &mut self.marginal {
            *survival = Some(Arc::new(f));
        }
        self
    }

    fn with_atom(mut self, value: f64) -> Self {
        self.marginal = Marginal::Atom(value);
        self
    }

    pub fn with_sampler(
        mut self,
        f: impl Fn(&mut dyn RngCore) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.sampler = Some(Arc::new(f));
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Supremum of the arguments at which the MGF is finite.
    pub fn mgf_domain_bound(&self) -> f64 {
        self.bound
    }

    /// `phi(s)`, or `+inf` outside the domain.
    pub fn mgf(&self, s: f64) -> f64 {
        if s >= self.bound {
            f64::INFINITY
        } else {
            (self.mgf)(s)
        }
    }

    /// `ln phi(s)`.
    pub fn log_mgf(&self, s: f64) -> f64 {
        if s >= self.bound {
            return f64::INFINITY;
        }
        match &self.log_mgf {
            Some(f) => f(s),
            None => (self.mgf)(s).ln(),
        }
    }

    /// MGF value with a domain check that reports the offending argument.
    pub fn mgf_checked(&self, s: f64) -> Result<f64> {
        self.check_argument(s)?;
        Ok((self.mgf)(s))
    }

    pub fn log_mgf_checked(&self, s: f64) -> Result<f64> {
        self.check_argument(s)?;
        Ok(self.log_mgf(s))
    }

    pub(crate) fn check_argument(&self, s: f64) -> Result<()> {
        if s.is_nan() || s >= self.bound {
            Err(Error::MgfDomain {
                law: self.label.clone(),
                argument: s,
                bound: self.bound,
            })
        } else {
            Ok(())
        }
    }

    pub fn has_density(&self) -> bool {
        matches!(self.marginal, Marginal::Density { .. })
    }

    /// Density of `Y` on `(0, inf)`, if the law is continuous.
    pub fn density(&self, y: f64) -> Option<f64> {
        match &self.marginal {
            Marginal::Density { density, .. } => Some(if y > 0.0 { density(y) } else { 0.0 }),
            _ => None,
        }
    }

    pub fn survival(&self, y: f64) -> Option<f64> {
        match &self.marginal {
            Marginal::Density {
                survival: Some(s), ..
            } => Some(s(y)),
            _ => None,
        }
    }

    /// Location of the atom for a degenerate law.
    pub fn atom(&self) -> Option<f64> {
        match self.marginal {
            Marginal::Atom(v) => Some(v),
            _ => None,
        }
    }

    pub fn has_sampler(&self) -> bool {
        self.sampler.is_some()
    }

    /// One draw of `Y` from the caller's RNG stream.
    pub fn sample(&self, rng: &mut dyn RngCore) -> Option<f64> {
        self.sampler.as_ref().map(|f| f(rng))
    }
}

fn open_uniform(rng: &mut dyn RngCore) -> f64 {
    rng.sample(Open01)
}

fn exp1() -> MixingLaw {
    MixingLaw::new("exp1", |s| 1.0 / (1.0 - s), 1.0)
        .with_log_mgf(|s| -(-s).ln_1p())
        .with_density(|y| (-y).exp())
        .with_survival(|y| if y <= 0.0 { 1.0 } else { (-y).exp() })
        .with_sampler(|rng| -open_uniform(rng).ln())
}

// Shape 2, rate 2: mean 1, variance 1/2.
fn gamma22() -> MixingLaw {
    MixingLaw::new(
        "gamma22",
        |s| {
            let r = 2.0 / (2.0 - s);
            r * r
        },
        2.0,
    )
    .with_log_mgf(|s| -2.0 * (-0.5 * s).ln_1p())
    .with_density(|y| 4.0 * y * (-2.0 * y).exp())
    .with_survival(|y| {
        if y <= 0.0 {
            1.0
        } else {
            (1.0 + 2.0 * y) * (-2.0 * y).exp()
        }
    })
    .with_sampler(|rng| {
        let e1 = -open_uniform(rng).ln();
        let e2 = -open_uniform(rng).ln();
        0.5 * (e1 + e2)
    })
}

const IG_MEAN: f64 = 1.0;
const IG_SHAPE: f64 = 2.0;

fn ig_density(y: f64) -> f64 {
    let (mu, lambda) = (IG_MEAN, IG_SHAPE);
    (lambda / (2.0 * std::f64::consts::PI * y.powi(3))).sqrt()
        * (-lambda * (y - mu).powi(2) / (2.0 * mu * mu * y)).exp()
}

fn ig_survival(y: f64) -> f64 {
    if y <= 0.0 {
        return 1.0;
    }
    let (mu, lambda) = (IG_MEAN, IG_SHAPE);
    let r = (lambda / y).sqrt();
    let upper = normal::cdf(-r * (y / mu - 1.0));
    let reflected = (2.0 * lambda / mu).exp() * normal::cdf(-r * (y / mu + 1.0));
    (upper - reflected).max(0.0)
}

/// Michael, Schucany & Haas transformation with the root-selection step.
fn ig_sample(rng: &mut dyn RngCore) -> f64 {
    let (mu, lambda) = (IG_MEAN, IG_SHAPE);
    let n = normal::inv_cdf(open_uniform(rng));
    let v = n * n;
    let mu_v = mu * v;
    // larger root first; the smaller one follows from x_small * x_large = mu^2
    let x_large = mu
        + mu * mu_v / (2.0 * lambda)
        + mu / (2.0 * lambda) * (4.0 * lambda * mu_v + mu_v * mu_v).sqrt();
    let x_small = mu * mu / x_large;
    let u = open_uniform(rng);
    if u <= mu / (mu + x_small) {
        x_small
    } else {
        x_large
    }
}

// Inverse Gaussian with mean 1 and shape 2.
fn ig12() -> MixingLaw {
    MixingLaw::new("ig12", |s| (2.0 * (1.0 - (1.0 - s).sqrt())).exp(), 1.0)
        .with_log_mgf(|s| 2.0 * s / (1.0 + (1.0 - s).sqrt()))
        .with_density(ig_density)
        .with_survival(ig_survival)
        .with_sampler(ig_sample)
}

/// Built-in law by name: `exp1`, `gamma22`, `ig12`, or `pointmass` (`Y = 1`).
pub fn builtin_law(name: &str) -> Result<MixingLaw> {
    match name.trim().to_ascii_lowercase().as_str() {
        "exp1" => Ok(exp1()),
        "gamma22" => Ok(gamma22()),
        "ig12" => Ok(ig12()),
        "pointmass" => Ok(MixingLaw::point_mass(1.0).with_label("pointmass")),
        _ => Err(Error::UnknownLaw(name.to_string())),
    }
}
