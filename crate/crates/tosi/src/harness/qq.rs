//! QQ-plot data against the chi-square reference distribution.

use crate::error::{Error, Result};
use crate::numerics::chi2_quantile;

/// Pairs the i-th order statistic of `stats` with the chi-square(q)
/// quantile at probability (i - 0.5)/m, for external plotting.
pub fn qq_data(stats: &[f64], q: usize) -> Result<Vec<(f64, f64)>> {
    if stats.is_empty() {
        return Err(Error::Domain("qq_data needs a nonempty statistic sample".into()));
    }
    if stats.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("qq_data statistics must be finite".into()));
    }
    let m = stats.len();
    let mut sorted = stats.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut pairs = Vec::with_capacity(m);
    for (i, &emp) in sorted.iter().enumerate() {
        let prob = (i as f64 + 0.5) / m as f64;
        pairs.push((chi2_quantile(prob, q)?, emp));
    }
    Ok(pairs)
}
