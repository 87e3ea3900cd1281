//! Monte-Carlo benchmark for the terminal basket.
//!
//! Paths are split into `streams` equal blocks. Block `b` draws from a
//! ChaCha8 generator seeded with `seed` on stream `b`, so the result depends
//! only on `(paths, seed, streams, antithetic)` and not on how rayon
//! schedules the blocks. Block statistics are merged pairwise in block order.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::basket::BasketSpec;
use crate::error::{Error, Result};
use crate::law::MixingLaw;
use crate::moments::MomentSummary;
use crate::normal;

/// Simulation settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub paths: u64,
    pub seed: u64,
    /// Number of independent RNG substreams (and parallel blocks).
    pub streams: u32,
    /// Pair every draw `z` with `-z` (sharing the time change).
    pub antithetic: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            paths: 1_000_000,
            seed: 20_240_601,
            streams: 64,
            antithetic: false,
        }
    }
}

impl McConfig {
    pub fn new(paths: u64, seed: u64) -> Self {
        Self {
            paths,
            seed,
            ..Self::default()
        }
    }

    pub fn with_streams(mut self, streams: u32) -> Self {
        self.streams = streams;
        self
    }

    pub fn with_antithetic(mut self, antithetic: bool) -> Self {
        self.antithetic = antithetic;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(Error::InvalidConfig("paths must be at least 1".into()));
        }
        if self.streams == 0 {
            return Err(Error::InvalidConfig("streams must be at least 1".into()));
        }
        if !self.paths.is_multiple_of(u64::from(self.streams)) {
            return Err(Error::InvalidConfig(format!(
                "paths ({}) must be divisible by streams ({})",
                self.paths, self.streams
            )));
        }
        if self.antithetic && !(self.paths / u64::from(self.streams)).is_multiple_of(2) {
            return Err(Error::InvalidConfig(
                "antithetic sampling needs an even number of paths per stream".into(),
            ));
        }
        Ok(())
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub mean: f64,
    pub std_error: f64,
    pub paths: u64,
}

/// Sample raw moments of `B(T)` and the implied summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McMoments {
    pub m1: McResult,
    pub m2: McResult,
    pub m3: McResult,
    pub summary: MomentSummary,
}

#[derive(Debug, Clone, Copy, Default)]
struct Stats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Stats {
    #[inline]
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(a: Stats, b: Stats) -> Stats {
        if a.n == 0 {
            return b;
        }
        if b.n == 0 {
            return a;
        }
        let n = a.n + b.n;
        let delta = b.mean - a.mean;
        let wb = b.n as f64 / n as f64;
        Stats {
            n,
            mean: a.mean + delta * wb,
            m2: a.m2 + b.m2 + delta * delta * a.n as f64 * wb,
        }
    }

    fn result(&self, paths: u64) -> McResult {
        let var = if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        };
        McResult {
            mean: self.mean,
            std_error: (var.max(0.0) / self.n as f64).sqrt(),
            paths,
        }
    }
}

fn merge_pairwise(mut level: Vec<Stats>) -> Stats {
    if level.is_empty() {
        return Stats::default();
    }
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|c| if c.len() == 2 { Stats::merge(c[0], c[1]) } else { c[0] })
            .collect();
    }
    level[0]
}

/// Terminal asset model: `S_i(T) = exp(log_base_i + vol_i sqrt(clock) z_i)`.
struct TerminalModel<'a> {
    log_base: Vec<f64>,
    vol_sqrt_t: Vec<f64>,
    law: Option<&'a MixingLaw>,
}

impl<'a> TerminalModel<'a> {
    fn new(spec: &BasketSpec, law: Option<&'a MixingLaw>) -> Result<Self> {
        let t = spec.horizon;
        let mut log_base = Vec::with_capacity(spec.len());
        for i in 0..spec.len() {
            let half_var = 0.5 * spec.vols[i] * spec.vols[i] * t;
            let compensator = match law {
                None => half_var,
                Some(l) => l.log_mgf_checked(half_var)?,
            };
            log_base.push(spec.spots[i].ln() + spec.rate * t - compensator);
        }
        if let Some(l) = law {
            if !l.has_sampler() {
                return Err(Error::LawCapability {
                    law: l.label().to_string(),
                    what: "a sampler",
                });
            }
        }
        Ok(Self {
            log_base,
            vol_sqrt_t: spec.vols.iter().map(|v| v * t.sqrt()).collect(),
            law,
        })
    }

    #[inline]
    fn fill(&self, z: &[f64], clock_sqrt: f64, sign: f64, out: &mut [f64]) {
        for i in 0..out.len() {
            out[i] = (self.log_base[i] + sign * self.vol_sqrt_t[i] * clock_sqrt * z[i]).exp();
        }
    }
}

/// Runs the simulation and reports mean and standard error of each of the
/// `outputs` values written by `functional(terminal_prices, out)`.
pub fn simulate<F>(
    spec: &BasketSpec,
    law: Option<&MixingLaw>,
    cfg: &McConfig,
    outputs: usize,
    functional: F,
) -> Result<Vec<McResult>>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    cfg.validate()?;
    spec.validate()?;
    let factor = spec.factor()?;
    let model = TerminalModel::new(spec, law)?;
    let n = spec.len();
    let per_block = cfg.paths / u64::from(cfg.streams);

    let run_block = |block: u32| -> Result<Vec<Stats>> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(u64::from(block));
        let mut stats = vec![Stats::default(); outputs];
        let mut iid = vec![0.0; n];
        let mut z = vec![0.0; n];
        let mut prices = vec![0.0; n];
        let mut values = vec![0.0; outputs];
        let mut mirror = vec![0.0; outputs];
        let draws = if cfg.antithetic { per_block / 2 } else { per_block };
        for k in 0..draws {
            let clock = match model.law {
                None => 1.0,
                Some(l) => {
                    let y = l.sample(&mut rng).unwrap_or(f64::NAN);
                    if !(y.is_finite() && y > 0.0) {
                        return Err(Error::SamplerFailure {
                            law: l.label().to_string(),
                            path: u64::from(block) * per_block + k,
                            value: y,
                        });
                    }
                    y
                }
            };
            for v in iid.iter_mut() {
                *v = normal::inv_cdf(rng.sample(Open01));
            }
            factor.apply(&iid, &mut z);
            let clock_sqrt = clock.sqrt();
            model.fill(&z, clock_sqrt, 1.0, &mut prices);
            functional(&prices, &mut values);
            if cfg.antithetic {
                model.fill(&z, clock_sqrt, -1.0, &mut prices);
                functional(&prices, &mut mirror);
                for (v, w) in values.iter_mut().zip(&mirror) {
                    *v = 0.5 * (*v + w);
                }
            }
            for (s, v) in stats.iter_mut().zip(&values) {
                s.push(*v);
            }
        }
        Ok(stats)
    };

    let blocks: Vec<Vec<Stats>> = (0..cfg.streams)
        .into_par_iter()
        .map(run_block)
        .collect::<Result<_>>()?;
    Ok((0..outputs)
        .map(|j| merge_pairwise(blocks.iter().map(|b| b[j]).collect()).result(cfg.paths))
        .collect())
}

fn basket_value(weights: &[f64], prices: &[f64]) -> f64 {
    weights.iter().zip(prices).map(|(w, s)| w * s).sum()
}

/// Discounted call payoffs at several strikes from one set of paths.
pub fn mc_prices(
    spec: &BasketSpec,
    law: Option<&MixingLaw>,
    strikes: &[f64],
    cfg: &McConfig,
) -> Result<Vec<McResult>> {
    let disc = (-spec.rate * spec.horizon).exp();
    simulate(spec, law, cfg, strikes.len(), |prices, out| {
        let b = basket_value(&spec.weights, prices);
        for (o, k) in out.iter_mut().zip(strikes) {
            *o = disc * (b - k).max(0.0);
        }
    })
}

/// Call price under correlated log-normal assets.
pub fn mc_price_lognormal(spec: &BasketSpec, cfg: &McConfig) -> Result<McResult> {
    Ok(mc_prices(spec, None, &[spec.strike], cfg)?[0])
}

/// Call price when all assets share the time change `law`.
pub fn mc_price_mixture(spec: &BasketSpec, law: &MixingLaw, cfg: &McConfig) -> Result<McResult> {
    Ok(mc_prices(spec, Some(law), &[spec.strike], cfg)?[0])
}

/// Sample raw moments `E[B], E[B^2], E[B^3]` of the terminal basket.
pub fn mc_moments(spec: &BasketSpec, law: Option<&MixingLaw>, cfg: &McConfig) -> Result<McMoments> {
    let r = simulate(spec, law, cfg, 3, |prices, out| {
        let b = basket_value(&spec.weights, prices);
        out[0] = b;
        out[1] = b * b;
        out[2] = b * b * b;
    })?;
    Ok(McMoments {
        m1: r[0],
        m2: r[1],
        m3: r[2],
        summary: MomentSummary::summarize(r[0].mean, r[1].mean, r[2].mean),
    })
}

/// Sample means of `e^{-rT} S_i(T)`, which should equal `S_i(0)`.
pub fn mc_discounted_assets(
    spec: &BasketSpec,
    law: Option<&MixingLaw>,
    cfg: &McConfig,
) -> Result<Vec<McResult>> {
    let disc = (-spec.rate * spec.horizon).exp();
    simulate(spec, law, cfg, spec.len(), |prices, out| {
        for (o, s) in out.iter_mut().zip(prices) {
            *o = disc * s;
        }
    })
}
