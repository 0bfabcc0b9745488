//! Mean-model backend: per-coordinate sample means with sample variances
//! (q = 1).

use crate::engine::{EstimateSet, EstimatorBackend};
use crate::error::{Error, Result};
use crate::numerics::{DataMatrix, SpdMatrix};
use nalgebra::DVector;

pub const DEFAULT_VARIANCE_FLOOR: f64 = 1e-12;

/// Column means over a row subset, with unbiased sample variances.
pub fn mean_estimates(
    data: &DataMatrix,
    rows: &[usize],
    g: &[usize],
    variance_floor: f64,
) -> Result<EstimateSet> {
    if rows.len() < 2 {
        return Err(Error::TooFewObservations { need: 2, got: rows.len() });
    }
    for &j in g {
        if j == 0 || j > data.ncols() {
            return Err(Error::Domain(format!("variable index {j} out of 1..={}", data.ncols())));
        }
    }
    let n = rows.len() as f64;
    let mut theta = Vec::with_capacity(g.len());
    let mut sigma = Vec::with_capacity(g.len());
    for &j in g {
        let mut sum = 0.0;
        for &i in rows {
            sum += data.get(i, j - 1);
        }
        let mean = sum / n;
        let mut ss = 0.0;
        for &i in rows {
            let d = data.get(i, j - 1) - mean;
            ss += d * d;
        }
        let var = ss / (n - 1.0);
        if var < variance_floor {
            return Err(Error::Singular(format!(
                "column {j} variance {var:.3e} below floor (constant column?)"
            )));
        }
        theta.push(DVector::from_vec(vec![mean]));
        sigma.push(SpdMatrix::scalar(var)?);
    }
    EstimateSet::new(g.to_vec(), theta, sigma, rows.len())
}

/// Backend wrapper holding the data matrix.
pub struct MeanBackend<'a> {
    data: &'a DataMatrix,
    variance_floor: f64,
}

impl<'a> MeanBackend<'a> {
    pub fn new(data: &'a DataMatrix) -> Self {
        Self { data, variance_floor: DEFAULT_VARIANCE_FLOOR }
    }

    pub fn with_variance_floor(data: &'a DataMatrix, variance_floor: f64) -> Result<Self> {
        if !(variance_floor > 0.0) {
            return Err(Error::Domain("variance floor must be positive".into()));
        }
        Ok(Self { data, variance_floor })
    }
}

impl EstimatorBackend for MeanBackend<'_> {
    fn n_rows(&self) -> usize {
        self.data.nrows()
    }

    fn estimates(&self, rows: &[usize], g: &[usize]) -> Result<EstimateSet> {
        mean_estimates(self.data, rows, g, self.variance_floor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{Dist, RngStream};
    use approx::assert_relative_eq;

    #[test]
    fn direct_computation() {
        let data = DataMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let est = mean_estimates(&data, &[0, 1], &[1, 2], DEFAULT_VARIANCE_FLOOR).unwrap();
        let (t1, s1) = est.get(1).unwrap();
        let (t2, s2) = est.get(2).unwrap();
        assert_relative_eq!(t1[0], 2.0);
        assert_relative_eq!(t2[0], 3.0);
        assert_relative_eq!(s1.as_dmatrix()[(0, 0)], 2.0);
        assert_relative_eq!(s2.as_dmatrix()[(0, 0)], 2.0);
        assert_eq!(est.n_used(), 2);
    }

    #[test]
    fn law_of_large_numbers() {
        let mut s = RngStream::new(21, "mean-lln");
        let col = s.draw(Dist::StandardNormal, 10_000).unwrap();
        let rows: Vec<Vec<f64>> = col.iter().map(|&v| vec![v]).collect();
        let data = DataMatrix::from_rows(&rows).unwrap();
        let all: Vec<usize> = (0..10_000).collect();
        let est = mean_estimates(&data, &all, &[1], DEFAULT_VARIANCE_FLOOR).unwrap();
        let (t, v) = est.get(1).unwrap();
        assert!(t[0].abs() < 0.04);
        assert!((v.as_dmatrix()[(0, 0)] - 1.0).abs() < 0.05);
    }

    #[test]
    fn constant_column_is_singular() {
        let data = DataMatrix::from_rows(&[vec![5.0], vec![5.0], vec![5.0]]).unwrap();
        let err = mean_estimates(&data, &[0, 1, 2], &[1], DEFAULT_VARIANCE_FLOOR);
        assert!(matches!(err, Err(Error::Singular(_))));
    }

    #[test]
    fn shift_equivariance() {
        let mut s = RngStream::new(5, "shift");
        let col = s.draw(Dist::StandardNormal, 50).unwrap();
        let c = 3.25;
        let base: Vec<Vec<f64>> = col.iter().map(|&v| vec![v]).collect();
        let shifted: Vec<Vec<f64>> = col.iter().map(|&v| vec![v + c]).collect();
        let rows: Vec<usize> = (0..50).collect();
        let a = mean_estimates(&DataMatrix::from_rows(&base).unwrap(), &rows, &[1], 1e-12).unwrap();
        let b =
            mean_estimates(&DataMatrix::from_rows(&shifted).unwrap(), &rows, &[1], 1e-12).unwrap();
        let (ta, sa) = a.get(1).unwrap();
        let (tb, sb) = b.get(1).unwrap();
        assert_relative_eq!(tb[0] - ta[0], c, epsilon = 1e-12);
        assert_relative_eq!(sa.as_dmatrix()[(0, 0)], sb.as_dmatrix()[(0, 0)], epsilon = 1e-12);
    }
}
