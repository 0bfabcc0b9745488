//! Estimator backends pluggable into the TOSI engine.

pub mod factor;
pub mod mean;
pub mod regression;
