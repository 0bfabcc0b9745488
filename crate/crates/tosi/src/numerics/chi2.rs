//! Chi-square tail probabilities via the regularized incomplete gamma
//! function, with the usual series / continued-fraction switch.

use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const ITMAX: usize = 2000;
const FPMIN: f64 = 1e-300;

/// Survival function of the chi-square distribution with `q` degrees of
/// freedom: `P(X > x)`. Relative error is at the 1e-10 level or better.
pub fn chi2_sf(x: f64, q: usize) -> Result<f64> {
    if q == 0 {
        return Err(Error::Domain("chi2_sf: degrees of freedom must be >= 1".into()));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("chi2_sf: statistic must be finite and >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    Ok(gamma_q(q as f64 / 2.0, x / 2.0))
}

/// Lower quantile: smallest `x` with `P(X <= x) = prob`.
pub fn chi2_quantile(prob: f64, q: usize) -> Result<f64> {
    if q == 0 {
        return Err(Error::Domain("chi2_quantile: degrees of freedom must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&prob) {
        return Err(Error::Domain(format!("chi2_quantile: probability must be in [0, 1), got {prob}")));
    }
    if prob == 0.0 {
        return Ok(0.0);
    }
    // Bracket the root of sf(x) = 1 - prob, then bisect.
    let target = 1.0 - prob;
    let mut hi = q as f64;
    while chi2_sf(hi, q)? > target {
        hi *= 2.0;
        if hi > 1e12 {
            break;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi2_sf(mid, q)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * (1.0 + hi) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Regularized upper incomplete gamma Q(a, x).
fn gamma_q(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

/// Series expansion for the regularized lower incomplete gamma P(a, x),
/// valid for x < a + 1.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..ITMAX {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    let ln_prefactor = a * x.ln() - x - ln_gamma(a);
    if ln_prefactor < -700.0 {
        return if x < a { 0.0 } else { 1.0 };
    }
    sum * ln_prefactor.exp()
}

/// Lentz continued fraction for Q(a, x), valid for x >= a + 1.
fn gamma_q_cf(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=ITMAX {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    let ln_prefactor = a * x.ln() - x - ln_gamma(a);
    if ln_prefactor < -700.0 {
        return 0.0;
    }
    ln_prefactor.exp() * h
}

/// Lanczos approximation of ln Gamma(x) for x > 0 (g = 7, n = 9).
fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // Reflection formula.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}
