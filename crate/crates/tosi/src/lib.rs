//! Two-directional simultaneous inference (TOSI) for high-dimensional
//! models.
//!
//! A TOSI analysis pairs two sample-split tests over a set of parameter
//! indices: a two-stage maximum test of an assumed-zero set (is anything in
//! here actually nonzero?) and a two-stage minimum test of an assumed-nonzero
//! set (is anything in here actually zero?). Three estimator backends are
//! provided — per-coordinate means, the debiased lasso for sparse linear
//! regression, and least-squares latent factor loadings — together with a
//! multi-split aggregation, a TOSI-guided penalty tuner, and a Monte Carlo
//! harness for size/power studies.

pub mod engine;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod numerics;
pub mod tuning;

pub use engine::{
    by_adjust, holm_adjust, make_split_plan, markov_rejections, stage1_select, tosi_multi,
    tosi_single, wald_stat, EstimateSet, EstimatorBackend, MultiSplitResult, SplitPlan, TestMode,
    TestResult,
};
pub use error::{Error, Result};
pub use numerics::{chi2_quantile, chi2_sf, thin_svd, DataMatrix, Dist, RngStream, SpdMatrix};
