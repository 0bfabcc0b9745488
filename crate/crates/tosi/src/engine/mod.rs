//! The TOSI engine: sample-split two-stage max/min tests and their
//! multi-split aggregation.

mod adjust;
mod split;

pub use adjust::{by_adjust, holm_adjust, markov_rejections};
pub use split::{make_split_plan, SplitPlan};

use crate::error::{Error, Result};
use crate::numerics::{chi2_sf, RngStream, SpdMatrix};
use nalgebra::DVector;
use serde::Serialize;

/// Direction of the two-stage test: `Max` targets an assumed-zero set
/// (reject if any parameter is nonzero), `Min` an assumed-nonzero set
/// (reject the claim that some parameter is zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TestMode {
    Max,
    Min,
}

/// Per-index estimates: for each variable index j (1-based), a q-vector
/// estimate and its q-by-q asymptotic covariance of sqrt(n) * (theta_hat -
/// theta).
#[derive(Debug, Clone)]
pub struct EstimateSet {
    indices: Vec<usize>,
    theta: Vec<DVector<f64>>,
    sigma: Vec<SpdMatrix>,
    n_used: usize,
    q: usize,
}

impl EstimateSet {
    pub fn new(
        indices: Vec<usize>,
        theta: Vec<DVector<f64>>,
        sigma: Vec<SpdMatrix>,
        n_used: usize,
    ) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Domain("estimate set must be nonempty".into()));
        }
        if indices.len() != theta.len() || indices.len() != sigma.len() {
            return Err(Error::Domain("estimate set fields must have equal length".into()));
        }
        let mut seen = indices.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != indices.len() {
            return Err(Error::Domain("estimate set indices must be distinct".into()));
        }
        let q = theta[0].len();
        if theta.iter().any(|t| t.len() != q) || sigma.iter().any(|s| s.dim() != q) {
            return Err(Error::Domain("estimates must share a common dimension q".into()));
        }
        Ok(Self { indices, theta, sigma, n_used, q })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n_used(&self) -> usize {
        self.n_used
    }

    pub fn get(&self, j: usize) -> Option<(&DVector<f64>, &SpdMatrix)> {
        let pos = self.indices.iter().position(|&i| i == j)?;
        Some((&self.theta[pos], &self.sigma[pos]))
    }
}

/// An estimation procedure usable as the TOSI backend: given a row subset of
/// its data and a 1-based variable index set G, produce an [`EstimateSet`]
/// over exactly G. Implementations must be deterministic in their inputs and
/// safe for concurrent read-only use.
pub trait EstimatorBackend: Sync {
    fn n_rows(&self) -> usize;
    fn estimates(&self, rows: &[usize], g: &[usize]) -> Result<EstimateSet>;
}

/// Outcome of a single-split two-stage test.
#[derive(Debug, Clone, Serialize)]
pub struct TestResult {
    pub mode: TestMode,
    /// Stage-I selected variable index (1-based).
    pub selected_index: usize,
    /// Wald statistic n_bar * theta^T Sigma^{-1} theta from the second half.
    pub statistic: f64,
    pub p_value: f64,
    pub q: usize,
}

/// Outcome of the multi-split procedure.
#[derive(Debug, Clone, Serialize)]
pub struct MultiSplitResult {
    pub mode: TestMode,
    pub raw_p: Vec<f64>,
    /// Holm-adjusted p-values, same order as `raw_p`.
    pub adjusted_p: Vec<f64>,
    /// min of the adjusted p-values.
    pub combined_p: f64,
    /// Number of adjusted p-values below alpha.
    pub k_rejections: usize,
    pub reject: bool,
    pub alpha: f64,
    pub selected_indices: Vec<usize>,
}

/// Stage-I criterion: standardized estimate norm ||Sigma^{-1/2} theta||_2.
fn standardized_norm(theta: &DVector<f64>, sigma: &SpdMatrix) -> Result<f64> {
    Ok(sigma.inv_quadratic_form(theta)?.max(0.0).sqrt())
}

/// Select argmax (Max) or argmin (Min) of the standardized norms over the
/// estimate set; ties break to the smallest index.
pub fn stage1_select(est: &EstimateSet, mode: TestMode) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (pos, &j) in est.indices.iter().enumerate() {
        let norm = standardized_norm(&est.theta[pos], &est.sigma[pos])?;
        let better = match best {
            None => true,
            Some((bj, bn)) => match mode {
                TestMode::Max => norm > bn || (norm == bn && j < bj),
                TestMode::Min => norm < bn || (norm == bn && j < bj),
            },
        };
        if better {
            best = Some((j, norm));
        }
    }
    Ok(best.expect("estimate set is nonempty by construction").0)
}

/// Wald statistic n_bar * theta^T Sigma^{-1} theta.
pub fn wald_stat(theta: &DVector<f64>, sigma: &SpdMatrix, n_bar: usize) -> Result<f64> {
    if n_bar == 0 {
        return Err(Error::Domain("wald_stat: n_bar must be >= 1".into()));
    }
    Ok(n_bar as f64 * sigma.inv_quadratic_form(theta)?)
}

/// Single-split two-stage test: Stage I selects the extremal index on D1,
/// Stage II Wald-tests that index on D2 against the chi-square(q) tail.
pub fn tosi_single(
    backend: &dyn EstimatorBackend,
    g: &[usize],
    mode: TestMode,
    d1: &[usize],
    d2: &[usize],
) -> Result<TestResult> {
    if g.is_empty() {
        return Err(Error::Domain("index set G must be nonempty".into()));
    }
    let est1 = backend.estimates(d1, g)?;
    let selected = stage1_select(&est1, mode)?;
    let est2 = backend.estimates(d2, &[selected])?;
    let (theta, sigma) = est2
        .get(selected)
        .ok_or_else(|| Error::Domain(format!("backend did not return index {selected}")))?;
    let statistic = wald_stat(theta, sigma, d2.len())?;
    let p_value = chi2_sf(statistic, est2.q())?;
    Ok(TestResult { mode, selected_index: selected, statistic, p_value, q: est2.q() })
}

/// Multi-split test: run `l` fresh splits, Holm-adjust the raw p-values, and
/// reject when the minimum adjusted p-value falls below alpha.
pub fn tosi_multi(
    backend: &dyn EstimatorBackend,
    g: &[usize],
    mode: TestMode,
    l: usize,
    alpha: f64,
    stream: &mut RngStream,
) -> Result<MultiSplitResult> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must be in (0, 1), got {alpha}")));
    }
    let plan = make_split_plan(backend.n_rows(), l, stream)?;
    let mut raw_p = Vec::with_capacity(l);
    let mut selected = Vec::with_capacity(l);
    for (d1, d2) in plan.iter() {
        let r = tosi_single(backend, g, mode, d1, d2)?;
        raw_p.push(r.p_value);
        selected.push(r.selected_index);
    }
    let adjusted_p = holm_adjust(&raw_p)?;
    let combined_p = adjusted_p.iter().copied().fold(f64::INFINITY, f64::min);
    let k_rejections = adjusted_p.iter().filter(|&&p| p < alpha).count();
    Ok(MultiSplitResult {
        mode,
        raw_p,
        adjusted_p,
        combined_p,
        k_rejections,
        reject: combined_p < alpha,
        alpha,
        selected_indices: selected,
    })
}
