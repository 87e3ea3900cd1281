//! TOML scenario files.
//!
//! ```toml
//! [[scenario]]
//! name = "S1"
//! group = "s1"                      # optional, defaults to name
//! spots = [100.0, 120.0]
//! vols = [0.2, 0.3]
//! weights = [-1.0, 1.0]
//! correlation_upper = [0.9]         # or: correlation = [[1.0, 0.9], [0.9, 1.0]]
//! rate = 0.03
//! horizon = 1.0
//! moneyness = [0.8, 0.9, 1.0]       # or: strikes = [16.0, 18.0]
//! laws = ["exp1", "gamma22", "ig12", "lognormal"]
//! paths = 1000000                   # optional
//! seed = 42                         # optional
//! ```
//!
//! `correlation_upper` lists the strict upper triangle row by row
//! (`rho_12, rho_13, ..., rho_23, ...`). Moneyness `m` becomes the strike
//! `m * B(0)` with `B(0) = sum w_i S_i(0)`.

use serde::{Deserialize, Serialize};

use crate::basket::BasketSpec;
use crate::error::{Error, Result};
use crate::law::{builtin_law, MixingLaw};

/// Name used for the plain log-normal model in `laws`.
pub const LOGNORMAL: &str = "lognormal";

/// A parsed scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, rename = "scenario")]
    pub scenarios: Vec<Scenario>,
}

/// One `[[scenario]]` block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub spots: Vec<f64>,
    pub vols: Vec<f64>,
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlation: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlation_upper: Option<Vec<f64>>,
    pub rate: f64,
    pub horizon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strikes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moneyness: Option<Vec<f64>>,
    pub laws: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A model named in `laws`: either log-normal or a built-in mixing law.
#[derive(Debug, Clone)]
pub enum Model {
    Lognormal,
    Mixture(MixingLaw),
}

impl Model {
    pub fn parse(name: &str) -> Result<Self> {
        if name.trim().eq_ignore_ascii_case(LOGNORMAL) {
            Ok(Model::Lognormal)
        } else {
            builtin_law(name).map(Model::Mixture)
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Model::Lognormal => LOGNORMAL,
            Model::Mixture(l) => l.label(),
        }
    }

    pub fn law(&self) -> Option<&MixingLaw> {
        match self {
            Model::Lognormal => None,
            Model::Mixture(l) => Some(l),
        }
    }
}

impl ScenarioFile {
    /// Parses and validates every block.
    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("scenario file: {e}")))?;
        if file.scenarios.is_empty() {
            return Err(Error::InvalidConfig(
                "scenario file contains no [[scenario]] blocks".into(),
            ));
        }
        for (i, s) in file.scenarios.iter().enumerate() {
            s.validate()
                .map_err(|e| e.context(format!("scenario `{}` (block {})", s.name, i + 1)))?;
        }
        Ok(file)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| e.context(path.display().to_string()))
    }

    /// Serializes back to TOML; [`ScenarioFile::parse`] inverts this.
    pub fn emit(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidConfig(format!("cannot serialize: {e}")))
    }
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidConfig(format!("field `{field}`: {msg}"))
}

impl Scenario {
    pub fn group_name(&self) -> &str {
        self.group.as_deref().unwrap_or(&self.name)
    }

    /// Full correlation matrix from either representation.
    #[allow(clippy::needless_range_loop)]
    pub fn correlation_matrix(&self) -> Result<Vec<Vec<f64>>> {
        let n = self.spots.len();
        match (&self.correlation, &self.correlation_upper) {
            (Some(_), Some(_)) => Err(field_error(
                "correlation",
                "give either `correlation` or `correlation_upper`, not both",
            )),
            (Some(full), None) => Ok(full.clone()),
            (None, Some(upper)) => {
                let expected = n * n.saturating_sub(1) / 2;
                if upper.len() != expected {
                    return Err(field_error(
                        "correlation_upper",
                        format!("expected {expected} entries for {n} assets, got {}", upper.len()),
                    ));
                }
                let mut m = vec![vec![0.0; n]; n];
                let mut it = upper.iter();
                for i in 0..n {
                    m[i][i] = 1.0;
                    for j in i + 1..n {
                        let v = *it.next().expect("length checked");
                        m[i][j] = v;
                        m[j][i] = v;
                    }
                }
                Ok(m)
            }
            (None, None) if n == 1 => Ok(vec![vec![1.0]]),
            (None, None) => Err(field_error("correlation", "missing for a multi-asset basket")),
        }
    }

    /// Basket at the first strike; use [`BasketSpec::with_strike`] for the others.
    pub fn basket(&self) -> Result<BasketSpec> {
        let corr = self.correlation_matrix()?;
        let strike = self.strikes()?.first().copied().unwrap_or(0.0);
        BasketSpec::new(
            self.weights.clone(),
            self.spots.clone(),
            self.vols.clone(),
            corr,
            self.rate,
            self.horizon,
            strike,
        )
    }

    /// Absolute strikes, converting moneyness through `B(0)`.
    pub fn strikes(&self) -> Result<Vec<f64>> {
        match (&self.strikes, &self.moneyness) {
            (Some(_), Some(_)) => Err(field_error(
                "strikes",
                "give either `strikes` or `moneyness`, not both",
            )),
            (Some(k), None) => Ok(k.clone()),
            (None, Some(m)) => {
                let b0: f64 = self.weights.iter().zip(&self.spots).map(|(w, s)| w * s).sum();
                Ok(m.iter().map(|x| x * b0).collect())
            }
            (None, None) => Err(field_error("strikes", "one of `strikes` or `moneyness` is required")),
        }
    }

    pub fn models(&self) -> Result<Vec<Model>> {
        self.laws
            .iter()
            .map(|l| Model::parse(l).map_err(|e| e.context("field `laws`")))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let strikes = self.strikes()?;
        if strikes.is_empty() {
            return Err(field_error("strikes", "empty list"));
        }
        if let Some(k) = strikes.iter().find(|k| !k.is_finite()) {
            return Err(field_error("strikes", format!("non-finite strike {k}")));
        }
        if self.laws.is_empty() {
            return Err(field_error("laws", "empty list"));
        }
        self.models()?;
        if self.paths == Some(0) {
            return Err(field_error("paths", "must be positive"));
        }
        self.basket()?;
        Ok(())
    }
}
