//! Synthetic data generators for the simulation experiments.

use crate::error::{Error, Result};
use crate::numerics::{DataMatrix, Dist, RngStream, SpdMatrix};
use nalgebra::DMatrix;

/// Draws a sparse coefficient vector: beta_j = rho * z with z ~ U[0,2] for
/// j <= s, zero otherwise.
pub fn gen_beta(p: usize, s: usize, rho: f64, stream: &mut RngStream) -> Result<Vec<f64>> {
    if s > p {
        return Err(Error::Domain(format!("s = {s} exceeds p = {p}")));
    }
    if !rho.is_finite() {
        return Err(Error::Domain("rho must be finite".into()));
    }
    let z = stream.draw(Dist::Uniform { a: 0.0, b: 2.0 }, s)?;
    let mut beta = vec![0.0; p];
    for (j, zj) in z.into_iter().enumerate() {
        beta[j] = rho * zj;
    }
    Ok(beta)
}

/// Rows i.i.d. N(0, Sigma) with sigma_jk = phi^{|j-k|}, sampled by the
/// stationary AR(1) recursion x_j = phi x_{j-1} + sqrt(1 - phi^2) z_j.
fn ar_design(n: usize, p: usize, phi: f64, stream: &mut RngStream) -> DataMatrix {
    let innov = (1.0 - phi * phi).sqrt();
    let mut m = DMatrix::zeros(n, p);
    for i in 0..n {
        let mut prev = stream.normal();
        m[(i, 0)] = prev;
        for j in 1..p {
            prev = phi * prev + innov * stream.normal();
            m[(i, j)] = prev;
        }
    }
    DataMatrix::from_dmatrix(m).expect("AR design is finite by construction")
}

/// Regression data for a fixed coefficient vector: X has AR(0.9) rows and
/// y = X beta + eps with eps ~ t(4)/sqrt(2) (unit variance).
pub fn gen_regression_fixed_beta(
    n: usize,
    beta: &[f64],
    stream: &mut RngStream,
) -> Result<(DataMatrix, Vec<f64>)> {
    let p = beta.len();
    if p == 0 || n == 0 {
        return Err(Error::Domain("n and p must be positive".into()));
    }
    let x = ar_design(n, p, 0.9, stream);
    let eps = stream.draw(Dist::StudentT { df: 4.0 }, n)?;
    let scale = 1.0 / 2f64.sqrt();
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let mut fit = 0.0;
        for (j, &b) in beta.iter().enumerate() {
            if b != 0.0 {
                fit += b * x.get(i, j);
            }
        }
        y.push(fit + scale * eps[i]);
    }
    Ok((x, y))
}

/// Full regression draw: beta is generated from the stream, then data are
/// produced for it. Callers that hold beta fixed across replicates should
/// draw it once with `gen_beta` and use `gen_regression_fixed_beta`.
pub fn gen_regression(
    n: usize,
    p: usize,
    s: usize,
    rho: f64,
    stream: &mut RngStream,
) -> Result<(DataMatrix, Vec<f64>, Vec<f64>)> {
    let beta = gen_beta(p, s, rho, stream)?;
    let (x, y) = gen_regression_fixed_beta(n, &beta, stream)?;
    Ok((x, y, beta))
}

/// Factor-model data: block-sparse loadings over A_k = {(k-1)s0+1..k*s0}
/// (the last block runs to s), nonzeros rho(1.5 - 0.24(k-1) + z) with
/// z ~ U[0,1]; factors N(0, AR(0.5)) centered and orthonormalized so that
/// n^{-1} H^T H = I_q; X = H B^T + U with Var(u_ij) = sigma_sq.
pub fn gen_factor(
    n: usize,
    p: usize,
    q: usize,
    s: usize,
    rho: f64,
    sigma_sq: f64,
    stream: &mut RngStream,
) -> Result<(DataMatrix, DMatrix<f64>, DMatrix<f64>)> {
    if q == 0 {
        return Err(Error::NoFactor);
    }
    if s > p {
        return Err(Error::Domain(format!("s = {s} exceeds p = {p}")));
    }
    if !(sigma_sq > 0.0) {
        return Err(Error::Domain("sigma_sq must be positive".into()));
    }
    let s0 = s / q;
    if s0 == 0 {
        return Err(Error::Domain(format!("floor(s/q) = 0 for s = {s}, q = {q}")));
    }
    if n <= q + 1 {
        return Err(Error::TooFewObservations { need: q + 2, got: n });
    }
    let mut b = DMatrix::zeros(p, q);
    for k in 0..q {
        let start = k * s0; // 0-based
        let end = if k + 1 == q { s } else { (k + 1) * s0 };
        for j in start..end {
            let z = stream.unit();
            b[(j, k)] = rho * (1.5 - 0.24 * k as f64 + z);
        }
    }
    // Factors: AR(0.5) rows, centered columns, then whitened so that
    // n^{-1} H^T H = I_q exactly.
    let raw = ar_design(n, q, 0.5, stream);
    let mut h = raw.as_dmatrix().clone();
    let nf = n as f64;
    for k in 0..q {
        let mean = h.column(k).sum() / nf;
        for i in 0..n {
            h[(i, k)] -= mean;
        }
    }
    let gram = SpdMatrix::new(h.transpose() * &h / nf)?;
    let h = h * gram.inv_sqrt()?.as_dmatrix();
    let mut x = &h * b.transpose();
    let sd = sigma_sq.sqrt();
    for v in x.iter_mut() {
        *v += sd * stream.normal();
    }
    Ok((DataMatrix::from_dmatrix(x)?, h, b))
}

/// Mean-model data: rows i.i.d. N(theta, I).
pub fn gen_mean(n: usize, theta: &[f64], stream: &mut RngStream) -> Result<DataMatrix> {
    if theta.is_empty() || n == 0 {
        return Err(Error::Domain("n and p must be positive".into()));
    }
    let p = theta.len();
    let mut m = DMatrix::zeros(n, p);
    for i in 0..n {
        for (j, &t) in theta.iter().enumerate() {
            m[(i, j)] = t + stream.normal();
        }
    }
    DataMatrix::from_dmatrix(m)
}
