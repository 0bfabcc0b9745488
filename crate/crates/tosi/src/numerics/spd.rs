//! Symmetric positive-definite matrices with conditioning.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Relative eigenvalue floor below which a conditioned matrix is declared
/// singular.
const EIG_FLOOR_REL: f64 = 1e-12;

/// A q-by-q symmetric positive-definite matrix (a covariance estimate).
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    m: DMatrix<f64>,
}

impl SpdMatrix {
    /// Validate symmetry (1e-12 relative) and store. Positivity is enforced
    /// lazily, at factorization time.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Domain("SPD matrix must be square and nonempty".into()));
        }
        let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
        for i in 0..m.nrows() {
            for j in (i + 1)..m.ncols() {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::Domain(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("SPD matrix contains a non-finite entry".into()));
        }
        Ok(Self { m })
    }

    pub fn scalar(v: f64) -> Result<Self> {
        Self::new(DMatrix::from_element(1, 1, v))
    }

    pub fn identity(q: usize) -> Self {
        Self { m: DMatrix::identity(q, q) }
    }

    /// sigma^2 I_q.
    pub fn scaled_identity(q: usize, sigma_sq: f64) -> Result<Self> {
        Self::new(DMatrix::identity(q, q) * sigma_sq)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// Conditioned eigendecomposition: fail if any eigenvalue sits below
    /// the relative floor.
    fn conditioned_eigen(&self) -> Result<(DMatrix<f64>, DVector<f64>)> {
        let eig = nalgebra::SymmetricEigen::new(self.m.clone());
        let max_ev = eig.eigenvalues.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v));
        if max_ev <= 0.0 {
            return Err(Error::Singular("covariance matrix has no positive eigenvalue".into()));
        }
        if eig.eigenvalues.iter().any(|&v| v <= EIG_FLOOR_REL * max_ev) {
            return Err(Error::Singular(format!(
                "covariance eigenvalue below conditioning floor (max {max_ev:.3e})"
            )));
        }
        Ok((eig.eigenvectors, eig.eigenvalues))
    }

    /// Inverse square root R with R * S * R = I.
    pub fn inv_sqrt(&self) -> Result<SpdMatrix> {
        let (v, ev) = self.conditioned_eigen()?;
        let d = DMatrix::from_diagonal(&ev.map(|e| 1.0 / e.sqrt()));
        let r = &v * d * v.transpose();
        // Symmetrize to wash out round-off from the triple product.
        let r = (&r + r.transpose()) * 0.5;
        Ok(SpdMatrix { m: r })
    }

    /// Quadratic form x^T S^{-1} x.
    pub fn inv_quadratic_form(&self, x: &DVector<f64>) -> Result<f64> {
        let (v, ev) = self.conditioned_eigen()?;
        let y = v.transpose() * x;
        Ok(y.iter().zip(ev.iter()).map(|(yi, ei)| yi * yi / ei).sum())
    }
}
