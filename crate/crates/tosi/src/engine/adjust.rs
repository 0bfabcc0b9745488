//! Multiple-testing p-value adjustments: Holm step-down and
//! Benjamini-Yekutieli step-up.

use crate::error::{Error, Result};

fn check_probabilities(p: &[f64]) -> Result<()> {
    for (i, &v) in p.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!("p-value {i} out of [0, 1]: {v}")));
        }
    }
    Ok(())
}

/// Holm step-down adjustment, mapped back to input order.
///
/// On sorted values: adj_(i) = min(1, max_{k<=i} (m-k+1) * p_(k)).
pub fn holm_adjust(p: &[f64]) -> Result<Vec<f64>> {
    check_probabilities(p)?;
    let m = p.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].partial_cmp(&p[b]).unwrap());
    let mut adjusted = vec![0.0; m];
    let mut running_max = 0.0f64;
    for (rank, &idx) in order.iter().enumerate() {
        running_max = running_max.max((m - rank) as f64 * p[idx]);
        adjusted[idx] = running_max.min(1.0);
    }
    Ok(adjusted)
}

/// Benjamini-Yekutieli step-up adjustment with harmonic factor
/// c(m) = sum_{i<=m} 1/i, mapped back to input order.
pub fn by_adjust(p: &[f64]) -> Result<Vec<f64>> {
    check_probabilities(p)?;
    let m = p.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let c_m: f64 = (1..=m).map(|i| 1.0 / i as f64).sum();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].partial_cmp(&p[b]).unwrap());
    let mut adjusted = vec![0.0; m];
    let mut running_min = f64::INFINITY;
    for rank in (0..m).rev() {
        let idx = order[rank];
        let value = c_m * m as f64 / (rank + 1) as f64 * p[idx];
        running_min = running_min.min(value);
        adjusted[idx] = running_min.min(1.0);
    }
    Ok(adjusted)
}

/// Markov-inequality multi-split diagnostic: with `r = k/L`, rejecting when
/// at least `k` of the raw p-values are <= gamma = alpha * r controls the
/// Type I error at alpha. Returns the count of raw p-values <= alpha * r.
pub fn markov_rejections(raw_p: &[f64], alpha: f64, r: f64) -> Result<usize> {
    check_probabilities(raw_p)?;
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must be in (0, 1), got {alpha}")));
    }
    if !(0.0 < r && r <= 1.0) {
        return Err(Error::Domain(format!("r must be in (0, 1], got {r}")));
    }
    let gamma = alpha * r;
    Ok(raw_p.iter().filter(|&&p| p <= gamma).count())
}
