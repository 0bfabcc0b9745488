//! Thin (rank-k) singular value decomposition.

use crate::error::{Error, Result};
use crate::numerics::DataMatrix;
use nalgebra::{DMatrix, DVector};

/// Rank-k factorization M ~ U * diag(S) * V^T with orthonormal columns.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v: DMatrix<f64>,
}

/// Best rank-k approximation via SVD; singular values are nonincreasing.
pub fn thin_svd(m: &DataMatrix, k: usize) -> Result<ThinSvd> {
    let (n, d) = (m.nrows(), m.ncols());
    if k == 0 || k > n.min(d) {
        return Err(Error::Domain(format!(
            "thin_svd: k must be in 1..=min(n, d) = {}, got {k}",
            n.min(d)
        )));
    }
    let svd = m.as_dmatrix().clone().svd(true, true);
    let u_full = svd.u.expect("svd requested u");
    let vt_full = svd.v_t.expect("svd requested v_t");
    // nalgebra returns singular values in descending order.
    let u = u_full.columns(0, k).into_owned();
    let s = DVector::from_iterator(k, svd.singular_values.iter().take(k).copied());
    let v = vt_full.rows(0, k).transpose();
    Ok(ThinSvd { u, singular_values: s, v })
}

impl ThinSvd {
    /// U * diag(S) * V^T.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let sd = DMatrix::from_diagonal(&self.singular_values);
        &self.u * sd * self.v.transpose()
    }
}
