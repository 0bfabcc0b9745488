//! Numerical substrate: dense matrices, chi-square tails, thin SVD,
//! SPD inverse square roots, and reproducible seeded random streams.

mod chi2;
mod rng;
mod spd;
mod svd;

pub use chi2::{chi2_quantile, chi2_sf};
pub use rng::{Dist, RngStream};
pub use spd::SpdMatrix;
pub use svd::{thin_svd, ThinSvd};

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Dense n-by-d real data matrix; rows are observations, columns variables.
///
/// All entries are finite by construction. Column indices exposed through the
/// public API are 1-based, matching the set-file convention; row indices are
/// 0-based and internal.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    inner: DMatrix<f64>,
}

impl DataMatrix {
    /// Build from a row-major nested array. Every row must have the same
    /// length and every entry must be finite.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::Domain("matrix must have at least one row and one column".into()));
        }
        let d = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::Domain(format!(
                    "ragged row {}: expected {} entries, found {}",
                    i + 1,
                    d,
                    r.len()
                )));
            }
            for (j, v) in r.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Domain(format!(
                        "non-finite entry at row {}, column {}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let inner = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
        Ok(Self { inner })
    }

    pub fn from_dmatrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::Domain("matrix must have at least one row and one column".into()));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("matrix contains a non-finite entry".into()));
        }
        Ok(Self { inner: m })
    }

    pub fn nrows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn get(&self, row: usize, col0: usize) -> f64 {
        self.inner[(row, col0)]
    }

    /// Column `j` (1-based) as an owned vector.
    pub fn column(&self, j: usize) -> DVector<f64> {
        self.inner.column(j - 1).into_owned()
    }

    /// Restrict to the given 0-based row subset, preserving order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self { inner: self.inner.select_rows(rows.iter()) }
    }
}
