//! Lower-triangular factorization of a correlation matrix.

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const NEGATIVE_PIVOT_TOL: f64 = -1e-10;
const ZERO_PIVOT: f64 = 1e-14;
const SINGULAR_RESIDUAL_TOL: f64 = 1e-8;

/// Lower-triangular `A` with `A * A^T = Sigma`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationFactor {
    n: usize,
    data: Vec<f64>,
}

impl CorrelationFactor {
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Row `i` of the factor (entries past the diagonal are zero).
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// `out = A * z`, mapping iid normals to correlated ones.
    #[inline]
    pub fn apply(&self, z: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            let row = &self.data[i * self.n..i * self.n + i + 1];
            *o = row.iter().zip(z).map(|(a, b)| a * b).sum();
        }
    }

    /// `max |A A^T - Sigma|`.
    #[allow(clippy::needless_range_loop)]
    pub fn reconstruction_error(&self, sigma: &[Vec<f64>]) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                let aat: f64 = (0..self.n).map(|k| self.get(i, k) * self.get(j, k)).sum();
                worst = worst.max((aat - sigma[i][j]).abs());
            }
        }
        worst
    }
}

/// Cholesky factorization that tolerates singular (semidefinite) matrices.
///
/// A pivot that is numerically zero produces a zero column; the remaining
/// entries of that column must then vanish as well, otherwise the matrix is
/// indefinite. Pivots below `-1e-10` are rejected outright.
pub fn factorize_correlation(sigma: &[Vec<f64>]) -> Result<CorrelationFactor> {
    let n = sigma.len();
    if n == 0 {
        return Err(Error::InvalidCorrelation("empty matrix".into()));
    }
    for (i, row) in sigma.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidCorrelation(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCorrelation(format!("row {i} is not finite")));
        }
        if (row[i] - 1.0).abs() > SYMMETRY_TOL {
            return Err(Error::InvalidCorrelation(format!(
                "diagonal entry {i} is {} rather than 1",
                row[i]
            )));
        }
        for j in 0..i {
            if (row[j] - sigma[j][i]).abs() > SYMMETRY_TOL {
                return Err(Error::InvalidCorrelation(format!(
                    "entries ({i},{j}) and ({j},{i}) differ"
                )));
            }
        }
    }

    let mut a = vec![0.0; n * n];
    for j in 0..n {
        let pivot = sigma[j][j] - (0..j).map(|k| a[j * n + k] * a[j * n + k]).sum::<f64>();
        if pivot < NEGATIVE_PIVOT_TOL {
            return Err(Error::NotPsd { index: j, pivot });
        }
        if pivot <= ZERO_PIVOT {
            for i in j + 1..n {
                let residual =
                    sigma[i][j] - (0..j).map(|k| a[i * n + k] * a[j * n + k]).sum::<f64>();
                if residual.abs() > SINGULAR_RESIDUAL_TOL {
                    return Err(Error::NotPsd { index: j, pivot });
                }
            }
            continue;
        }
        let diag = pivot.sqrt();
        a[j * n + j] = diag;
        for i in j + 1..n {
            let dot: f64 = (0..j).map(|k| a[i * n + k] * a[j * n + k]).sum();
            a[i * n + j] = (sigma[i][j] - dot) / diag;
        }
    }
    Ok(CorrelationFactor { n, data: a })
}
