//! Basket and spread option pricing by moment-matched shifted log-normal
//! approximants, for log-normal assets and for assets driven by a common
//! random clock (normal variance mixtures).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basket;
pub mod calibrate_lognormal;
pub mod calibrate_mixture;
pub mod correlation;
pub mod error;
pub mod greeks;
pub mod law;
pub mod metrics;
pub mod moments;
pub mod montecarlo;
pub mod normal;
pub mod pricing;
pub mod quadrature;
pub mod report;
pub mod roots;
pub mod scenario;

pub use basket::BasketSpec;
pub use calibrate_lognormal::{calibrate_lognormal, ShiftedLognormalParams, Sign};
pub use calibrate_mixture::{calibrate_mixture, MixtureParams};
pub use error::{Error, Result};
pub use law::{builtin_law, MixingLaw};
pub use moments::{basket_moments_lognormal, basket_moments_mixture, MomentSummary};
pub use pricing::{price_basket, PriceResult, PricingCase, PricingMethod};
