//! Latent factor backend: least-squares factor extraction via truncated
//! SVD of the centered data matrix, under the normalization
//! n^{-1} H^T H = I_q with B^T B diagonal and decreasing.

use crate::engine::{EstimateSet, EstimatorBackend};
use crate::error::{Error, Result};
use crate::numerics::{thin_svd, DataMatrix, SpdMatrix};
use nalgebra::{DMatrix, DVector};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Fitted factor model X ~ H B^T with idiosyncratic variances.
#[derive(Debug, Clone)]
pub struct FactorFit {
    /// Estimated factors, n x q, satisfying n^{-1} H^T H = I_q.
    pub h: DMatrix<f64>,
    /// Estimated loadings, p x q; B^T B is diagonal with decreasing
    /// entries and each column's first nonzero entry is positive.
    pub b: DMatrix<f64>,
    /// Per-variable residual variances sigma_j^2 = n^{-1} sum_i
    /// (x_ij - h_i^T b_j)^2.
    pub sigma_sq: Vec<f64>,
    /// Column means removed before extraction.
    pub centers: Vec<f64>,
    pub q: usize,
}

impl FactorFit {
    /// Loading row for variable j (1-based), as a q-vector.
    pub fn loading(&self, j: usize) -> Result<DVector<f64>> {
        if j == 0 || j > self.b.nrows() {
            return Err(Error::Domain(format!(
                "variable index {j} out of 1..={}",
                self.b.nrows()
            )));
        }
        Ok(self.b.row(j - 1).transpose())
    }
}

/// Extracts q factors from X by truncated SVD of the centered matrix.
/// With X_c = U S V^T, set H = sqrt(n) U_q and B = V_q S_q / sqrt(n); the
/// sign of each component is fixed so the first nonzero loading in each
/// column of B is positive (with the matching flip applied to H).
pub fn factor_fit(x: &DataMatrix, q: usize) -> Result<FactorFit> {
    let n = x.nrows();
    let p = x.ncols();
    if q == 0 {
        return Err(Error::NoFactor);
    }
    if q >= n.min(p) {
        return Err(Error::Domain(format!(
            "q = {q} must be below min(n, p) = {}",
            n.min(p)
        )));
    }
    if n < 2 {
        return Err(Error::TooFewObservations { need: 2, got: n });
    }
    let nf = n as f64;
    let mut centered = x.as_dmatrix().clone();
    let mut centers = vec![0.0; p];
    for j in 0..p {
        let mean = centered.column(j).sum() / nf;
        centers[j] = mean;
        for i in 0..n {
            centered[(i, j)] -= mean;
        }
    }
    let cm = DataMatrix::from_dmatrix(centered)?;
    let svd = thin_svd(&cm, q)?;
    let sqrt_n = nf.sqrt();
    let mut h = svd.u.clone() * sqrt_n;
    let mut b = DMatrix::zeros(p, q);
    for k in 0..q {
        let s = svd.singular_values[k];
        for j in 0..p {
            b[(j, k)] = svd.v[(j, k)] * s / sqrt_n;
        }
    }
    // Sign convention: first nonzero loading in each column positive.
    for k in 0..q {
        let lead = (0..p).find(|&j| b[(j, k)] != 0.0);
        if let Some(j0) = lead {
            if b[(j0, k)] < 0.0 {
                for j in 0..p {
                    b[(j, k)] = -b[(j, k)];
                }
                for i in 0..n {
                    h[(i, k)] = -h[(i, k)];
                }
            }
        }
    }
    // Residual variances against the fitted common component.
    let fitted = &h * b.transpose();
    let mut sigma_sq = vec![0.0; p];
    for j in 0..p {
        let mut acc = 0.0;
        for i in 0..n {
            let r = cm.get(i, j) - fitted[(i, j)];
            acc += r * r;
        }
        sigma_sq[j] = acc / nf;
    }
    Ok(FactorFit { h, b, sigma_sq, centers, q })
}

/// Eigenvalue-ratio choice of the factor count: with mu_1 >= mu_2 >= ...
/// the eigenvalues of the sample covariance, pick argmax_{k <= q_max} of
/// mu_k / mu_{k+1}.
pub fn select_q(x: &DataMatrix, q_max: usize) -> Result<usize> {
    let n = x.nrows();
    let p = x.ncols();
    if q_max == 0 || q_max + 1 > n.min(p) {
        return Err(Error::Domain(format!(
            "q_max = {q_max} needs q_max + 1 <= min(n, p) = {}",
            n.min(p)
        )));
    }
    let nf = n as f64;
    let mut centered = x.as_dmatrix().clone();
    for j in 0..p {
        let mean = centered.column(j).sum() / nf;
        for i in 0..n {
            centered[(i, j)] -= mean;
        }
    }
    let cm = DataMatrix::from_dmatrix(centered)?;
    let svd = thin_svd(&cm, q_max + 1)?;
    let eig: Vec<f64> = svd.singular_values.iter().map(|s| s * s / nf).collect();
    let mut best_k = 1usize;
    let mut best_ratio = f64::NEG_INFINITY;
    for k in 0..q_max {
        let denom = eig[k + 1].max(1e-300);
        let ratio = eig[k] / denom;
        if ratio > best_ratio {
            best_ratio = ratio;
            best_k = k + 1;
        }
    }
    Ok(best_k)
}

/// Hard-thresholds loading rows: row j is zeroed when
/// ||b_j|| <= c * sigma_j * sqrt(ln p / n). Returns the thresholded matrix
/// and the surviving (1-based) row indices.
pub fn sparsify_loadings(fit: &FactorFit, n: usize, c: f64) -> Result<(DMatrix<f64>, Vec<usize>)> {
    if !(c >= 0.0) {
        return Err(Error::Domain("threshold constant must be >= 0".into()));
    }
    let p = fit.b.nrows();
    let rate = ((p as f64).ln() / n as f64).sqrt();
    let mut out = fit.b.clone();
    let mut kept = Vec::new();
    for j in 0..p {
        let norm = fit.b.row(j).norm();
        if norm <= c * fit.sigma_sq[j].sqrt() * rate {
            for k in 0..fit.q {
                out[(j, k)] = 0.0;
            }
        } else {
            kept.push(j + 1);
        }
    }
    Ok((out, kept))
}

/// Builds the estimate set for loading rows: theta_j = b_j and
/// Sigma_j = sigma_j^2 I_q, the asymptotic covariance of sqrt(n) b_j under
/// the n^{-1} H^T H = I_q normalization.
pub fn factor_estimates(x: &DataMatrix, g: &[usize], q: usize) -> Result<EstimateSet> {
    let fit = factor_fit(x, q)?;
    estimates_from_fit(&fit, g, x.nrows())
}

fn estimates_from_fit(fit: &FactorFit, g: &[usize], n_used: usize) -> Result<EstimateSet> {
    let mut theta = Vec::with_capacity(g.len());
    let mut sigma = Vec::with_capacity(g.len());
    for &j in g {
        theta.push(fit.loading(j)?);
        let var = fit.sigma_sq[j - 1];
        if !(var > 0.0) {
            return Err(Error::Singular(format!(
                "zero idiosyncratic variance at index {j}"
            )));
        }
        sigma.push(SpdMatrix::scaled_identity(fit.q, var)?);
    }
    EstimateSet::new(g.to_vec(), theta, sigma, n_used)
}

/// Factor-loading backend over a fixed data matrix; refits per row subset
/// and memoizes the fit so repeated G-sets and split counts share work.
pub struct FactorBackend<'a> {
    x: &'a DataMatrix,
    q: usize,
    cache: Mutex<HashMap<Vec<usize>, Arc<FactorFit>>>,
}

impl<'a> FactorBackend<'a> {
    pub fn new(x: &'a DataMatrix, q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::NoFactor);
        }
        if q >= x.nrows().min(x.ncols()) {
            return Err(Error::Domain(format!(
                "q = {q} must be below min(n, p) = {}",
                x.nrows().min(x.ncols())
            )));
        }
        Ok(Self { x, q, cache: Mutex::new(HashMap::new()) })
    }

    fn fit_for(&self, rows: &[usize]) -> Result<Arc<FactorFit>> {
        if let Some(f) = self.cache.lock().unwrap().get(rows) {
            return Ok(f.clone());
        }
        let xr = self.x.select_rows(rows);
        let fit = Arc::new(factor_fit(&xr, self.q)?);
        self.cache.lock().unwrap().insert(rows.to_vec(), fit.clone());
        Ok(fit)
    }
}

impl EstimatorBackend for FactorBackend<'_> {
    fn n_rows(&self) -> usize {
        self.x.nrows()
    }

    fn estimates(&self, rows: &[usize], g: &[usize]) -> Result<EstimateSet> {
        let fit = self.fit_for(rows)?;
        estimates_from_fit(&fit, g, rows.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;
    use approx::assert_relative_eq;

    /// Exact two-factor data: X = H0 B0^T + noise.
    fn synth(n: usize, p: usize, q: usize, noise: f64, seed: u64) -> DataMatrix {
        let mut s = RngStream::new(seed, "factor-synth");
        let h0 = DMatrix::from_fn(n, q, |_, _| s.normal());
        // Random loading directions are near-orthogonal across components,
        // with strength decaying in k.
        let b0 = DMatrix::from_fn(p, q, |_, k| 2.0 / (k as f64 + 1.0) * s.normal());
        let mut x = h0 * b0.transpose();
        for v in x.iter_mut() {
            *v += noise * s.normal();
        }
        DataMatrix::from_dmatrix(x).unwrap()
    }

    #[test]
    fn normalization_invariants_hold() {
        let x = synth(120, 15, 2, 0.5, 1);
        let fit = factor_fit(&x, 2).unwrap();
        let n = 120.0;
        // (E1): n^{-1} H^T H = I_q.
        let hth = fit.h.transpose() * &fit.h / n;
        for a in 0..2 {
            for b in 0..2 {
                let target = if a == b { 1.0 } else { 0.0 };
                assert_relative_eq!(hth[(a, b)], target, epsilon = 1e-10);
            }
        }
        // (E2): B^T B diagonal with decreasing diagonal.
        let btb = fit.b.transpose() * &fit.b;
        assert!(btb[(0, 1)].abs() < 1e-10 && btb[(1, 0)].abs() < 1e-10);
        assert!(btb[(0, 0)] >= btb[(1, 1)]);
        // Sign convention on leading loadings.
        for k in 0..2 {
            let lead = (0..15).find(|&j| fit.b[(j, k)] != 0.0).unwrap();
            assert!(fit.b[(lead, k)] > 0.0);
        }
    }

    #[test]
    fn residual_variance_identity() {
        // n^{-1} ||X_c||_F^2 = n^{-1} ||H B^T||_F^2 + sum_j sigma_j^2,
        // since the truncated SVD residual is orthogonal to the fit.
        let x = synth(80, 10, 2, 1.0, 2);
        let fit = factor_fit(&x, 2).unwrap();
        let n = 80.0;
        let mut total = 0.0;
        for j in 0..10 {
            let mean = x.as_dmatrix().column(j).sum() / n;
            for i in 0..80 {
                let c = x.get(i, j) - mean;
                total += c * c;
            }
        }
        let common = (&fit.h * fit.b.transpose()).norm_squared();
        let resid: f64 = fit.sigma_sq.iter().sum();
        assert_relative_eq!(total / n, common / n + resid, epsilon = 1e-8, max_relative = 1e-8);
    }

    #[test]
    fn noiseless_rank_q_is_exact() {
        let x = synth(60, 8, 2, 0.0, 3);
        let fit = factor_fit(&x, 2).unwrap();
        for s in &fit.sigma_sq {
            assert!(s.abs() < 1e-16, "noiseless fit left residual variance {s}");
        }
    }

    #[test]
    fn select_q_recovers_truth() {
        for true_q in 1..=3usize {
            let x = synth(200, 30, true_q, 0.3, 40 + true_q as u64);
            assert_eq!(select_q(&x, 6).unwrap(), true_q, "true q = {true_q}");
        }
    }

    #[test]
    fn sparsify_keeps_strong_rows_only() {
        let n = 150;
        let p = 12;
        let mut s = RngStream::new(5, "sparse");
        let h0 = DMatrix::from_fn(n, 1, |_, _| s.normal());
        // Only the first 4 variables load on the factor.
        let b0 = DMatrix::from_fn(p, 1, |j, _| if j < 4 { 2.0 } else { 0.0 });
        let mut xm = h0 * b0.transpose();
        for v in xm.iter_mut() {
            *v += s.normal();
        }
        let x = DataMatrix::from_dmatrix(xm).unwrap();
        let fit = factor_fit(&x, 1).unwrap();
        let (thresholded, kept) = sparsify_loadings(&fit, n, 2.0).unwrap();
        assert_eq!(kept, vec![1, 2, 3, 4]);
        for j in 4..p {
            assert_eq!(thresholded[(j, 0)], 0.0);
        }
    }

    #[test]
    fn estimates_scale_with_loadings() {
        let x = synth(100, 10, 1, 0.5, 6);
        let est = factor_estimates(&x, &[1, 5, 10], 1).unwrap();
        let fit = factor_fit(&x, 1).unwrap();
        for &j in &[1usize, 5, 10] {
            let (theta, sigma) = est.get(j).unwrap();
            assert_relative_eq!(theta[0], fit.b[(j - 1, 0)], epsilon = 1e-12);
            assert_relative_eq!(
                sigma.as_dmatrix()[(0, 0)],
                fit.sigma_sq[j - 1],
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn backend_matches_direct_fit_on_subset() {
        let x = synth(90, 8, 2, 0.4, 7);
        let backend = FactorBackend::new(&x, 2).unwrap();
        let rows: Vec<usize> = (0..45).collect();
        let via_backend = backend.estimates(&rows, &[2, 7]).unwrap();
        let direct = factor_estimates(&x.select_rows(&rows), &[2, 7], 2).unwrap();
        for &j in &[2usize, 7] {
            let (tb, _) = via_backend.get(j).unwrap();
            let (td, _) = direct.get(j).unwrap();
            assert_relative_eq!(tb[0], td[0], epsilon = 1e-12);
            assert_relative_eq!(tb[1], td[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_bad_q() {
        let x = synth(20, 5, 1, 0.5, 8);
        assert!(matches!(factor_fit(&x, 0), Err(Error::NoFactor)));
        assert!(factor_fit(&x, 5).is_err());
        assert!(select_q(&x, 5).is_err());
    }
}
