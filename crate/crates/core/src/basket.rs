//! Static market data for a basket call.

use serde::{Deserialize, Serialize};

use crate::correlation::{factorize_correlation, CorrelationFactor};
use crate::error::{Error, Result};

/// Weights, spots, volatilities and correlation of a basket plus the option
/// terms (rate, horizon, strike).
///
/// Weights may have either sign, which is what makes spreads representable.
/// The correlation matrix is stored row-major as an `n x n` nested vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasketSpec {
    pub weights: Vec<f64>,
    pub spots: Vec<f64>,
    pub vols: Vec<f64>,
    pub correlation: Vec<Vec<f64>>,
    pub rate: f64,
    pub horizon: f64,
    pub strike: f64,
}

impl BasketSpec {
    /// Builds and validates a basket.
    pub fn new(
        weights: Vec<f64>,
        spots: Vec<f64>,
        vols: Vec<f64>,
        correlation: Vec<Vec<f64>>,
        rate: f64,
        horizon: f64,
        strike: f64,
    ) -> Result<Self> {
        let spec = Self {
            weights,
            spots,
            vols,
            correlation,
            rate,
            horizon,
            strike,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Single asset basket with unit weight.
    pub fn single(spot: f64, vol: f64, rate: f64, horizon: f64, strike: f64) -> Result<Self> {
        Self::new(
            vec![1.0],
            vec![spot],
            vec![vol],
            vec![vec![1.0]],
            rate,
            horizon,
            strike,
        )
    }

    /// Two-asset basket with a single correlation coefficient.
    pub fn pair(
        weights: [f64; 2],
        spots: [f64; 2],
        vols: [f64; 2],
        rho: f64,
        rate: f64,
        horizon: f64,
        strike: f64,
    ) -> Result<Self> {
        Self::new(
            weights.to_vec(),
            spots.to_vec(),
            vols.to_vec(),
            vec![vec![1.0, rho], vec![rho, 1.0]],
            rate,
            horizon,
            strike,
        )
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Current basket value `B(0) = sum w_i S_i(0)`.
    pub fn initial_value(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.spots)
            .map(|(w, s)| w * s)
            .sum()
    }

    /// Same basket with a different strike.
    pub fn with_strike(&self, strike: f64) -> Self {
        Self {
            strike,
            ..self.clone()
        }
    }

    /// Checks shapes, signs and positive semidefiniteness of the correlation.
    pub fn validate(&self) -> Result<()> {
        let n = self.weights.len();
        if n == 0 {
            return Err(Error::InvalidBasket("basket has no assets".into()));
        }
        if self.spots.len() != n || self.vols.len() != n || self.correlation.len() != n {
            return Err(Error::InvalidBasket(format!(
                "length mismatch: {} weights, {} spots, {} vols, {} correlation rows",
                n,
                self.spots.len(),
                self.vols.len(),
                self.correlation.len()
            )));
        }
        if self.weights.iter().all(|w| *w == 0.0) {
            return Err(Error::InvalidBasket("all weights are zero".into()));
        }
        let all_finite = self
            .weights
            .iter()
            .chain(&self.spots)
            .chain(&self.vols)
            .chain([&self.rate, &self.horizon, &self.strike])
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidBasket("non-finite input".into()));
        }
        if let Some(s) = self.spots.iter().find(|s| **s <= 0.0) {
            return Err(Error::InvalidBasket(format!("spot {s} is not positive")));
        }
        if let Some(v) = self.vols.iter().find(|v| **v < 0.0) {
            return Err(Error::InvalidBasket(format!("volatility {v} is negative")));
        }
        if self.horizon <= 0.0 {
            return Err(Error::InvalidBasket(format!(
                "horizon {} is not positive",
                self.horizon
            )));
        }
        self.factor().map(|_| ())
    }

    /// Lower-triangular factor of the correlation matrix.
    pub fn factor(&self) -> Result<CorrelationFactor> {
        factorize_correlation(&self.correlation)
    }

    /// Correlation coefficient between assets `i` and `j`.
    #[inline]
    pub(crate) fn rho(&self, i: usize, j: usize) -> f64 {
        self.correlation[i][j]
    }
}
