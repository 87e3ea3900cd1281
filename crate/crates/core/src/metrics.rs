//! Accuracy of approximate prices against a benchmark.
//!
//! `C1` is the percentage of cases whose relative error is strictly below
//! 2%, and `C2` is the mean absolute relative error in percent.

use crate::error::{Error, Result};

const GOOD_PRICE_THRESHOLD: f64 = 0.02;

/// One approximate price and its benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub val: f64,
    pub mc: f64,
    pub label: String,
}

impl CaseResult {
    pub fn new(val: f64, mc: f64, label: impl Into<String>) -> Self {
        Self {
            val,
            mc,
            label: label.into(),
        }
    }

    /// `|val - mc| / |mc|`.
    pub fn relative_error(&self) -> f64 {
        (self.val - self.mc).abs() / self.mc.abs()
    }
}

/// `(C1, C2)` in percent.
pub fn c1_c2(cases: &[CaseResult]) -> Result<(f64, f64)> {
    if cases.is_empty() {
        return Err(Error::EmptyCases);
    }
    if let Some(bad) = cases.iter().find(|c| c.mc == 0.0) {
        return Err(Error::ZeroBenchmark(bad.label.clone()));
    }
    let n = cases.len() as f64;
    let good = cases
        .iter()
        .filter(|c| c.relative_error() < GOOD_PRICE_THRESHOLD)
        .count() as f64;
    let mean_err = cases.iter().map(CaseResult::relative_error).sum::<f64>() / n;
    Ok((100.0 * good / n, 100.0 * mean_err))
}
