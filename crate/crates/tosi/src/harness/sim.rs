//! Monte Carlo size/power tables over the standard set families.

use crate::engine::{tosi_multi, EstimatorBackend, TestMode};
use crate::error::{Error, Result};
use crate::estimators::factor::FactorBackend;
use crate::estimators::mean::MeanBackend;
use crate::estimators::regression::{DebiasConfig, RegressionBackend};
use crate::harness::dgp::{gen_beta, gen_factor, gen_mean, gen_regression_fixed_beta};
use crate::harness::gsets::{build_gsets, gset_mode};
use crate::numerics::RngStream;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Mean,
    Regression,
    Factor,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimConfig {
    pub experiment: Experiment,
    pub n: usize,
    pub p: usize,
    /// True support size; the support is {1..s}.
    pub s: usize,
    /// Factor count (factor experiment only).
    pub q: usize,
    /// Signal strength multiplier.
    pub rho: f64,
    /// Idiosyncratic noise variance (factor experiment only).
    pub sigma_sq: f64,
    /// Split counts to tabulate.
    pub l_values: Vec<usize>,
    pub alpha: f64,
    pub reps: usize,
    pub seed: u64,
    /// Families to run; empty means all twelve.
    pub gset_labels: Vec<String>,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::Domain("reps must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        if self.s > self.p {
            return Err(Error::Domain(format!("s = {} exceeds p = {}", self.s, self.p)));
        }
        if self.l_values.is_empty() || self.l_values.contains(&0) {
            return Err(Error::Domain("l_values must be nonempty positive counts".into()));
        }
        if self.experiment == Experiment::Factor && self.q == 0 {
            return Err(Error::Domain("factor experiment needs q >= 1".into()));
        }
        Ok(())
    }
}

/// One tabulated rejection rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimCell {
    pub rate: f64,
    /// Replicates contributing to the cell (failures excluded).
    pub reps: usize,
    /// Monte Carlo standard error sqrt(r(1-r)/reps).
    pub se: f64,
}

/// Cell key: (set family label, method, L, n).
pub type CellKey = (String, String, usize, usize);

#[derive(Debug, Clone, Serialize)]
pub struct SimTable {
    pub cells: BTreeMap<CellKey, SimCell>,
    /// Replicates discarded wholesale due to estimator failures.
    pub failures: usize,
}

impl SimTable {
    pub fn get(&self, gset: &str, method: &str, l: usize, n: usize) -> Option<&SimCell> {
        self.cells.get(&(gset.to_string(), method.to_string(), l, n))
    }
}

fn method_name(mode: TestMode) -> &'static str {
    match mode {
        TestMode::Max => "tomax",
        TestMode::Min => "tomin",
    }
}

/// Runs every (set family, L) cell for one replicate. All tests share the
/// same split randomness: split plans are prefix-stable in L, so backend
/// caches are reused across cells.
fn run_replicate(
    backend: &dyn EstimatorBackend,
    sets: &[(String, Vec<usize>, TestMode)],
    l_values: &[usize],
    alpha: f64,
    split_stream: &RngStream,
) -> Result<Vec<(CellKey, bool)>> {
    let n = backend.n_rows();
    let mut out = Vec::with_capacity(sets.len() * l_values.len());
    for (label, g, mode) in sets {
        for &l in l_values {
            let res = tosi_multi(backend, g, *mode, l, alpha, &mut split_stream.clone())?;
            out.push((
                (label.clone(), method_name(*mode).to_string(), l, n),
                res.reject,
            ));
        }
    }
    Ok(out)
}

/// Monte Carlo size/power table. Each replicate owns a seeded substream,
/// so the result is independent of execution order; failed replicates are
/// discarded from every cell and counted.
pub fn run_size_power(cfg: &SimConfig) -> Result<SimTable> {
    cfg.validate()?;
    let all_sets = build_gsets(cfg.p, cfg.s)?;
    let labels: Vec<String> = if cfg.gset_labels.is_empty() {
        all_sets.keys().cloned().collect()
    } else {
        cfg.gset_labels.clone()
    };
    let mut sets = Vec::with_capacity(labels.len());
    for label in &labels {
        let g = all_sets
            .get(label)
            .ok_or_else(|| Error::Domain(format!("unknown set family label {label}")))?;
        sets.push((label.clone(), g.clone(), gset_mode(label)?));
    }

    let master = RngStream::new(cfg.seed, "sim");
    // Coefficients are drawn once per run and held fixed across replicates.
    let beta = gen_beta(cfg.p, cfg.s, cfg.rho, &mut master.substream("beta"))?;
    let theta_mean: Vec<f64> =
        (0..cfg.p).map(|j| if j < cfg.s { cfg.rho } else { 0.0 }).collect();

    let mut tallies: BTreeMap<CellKey, usize> = BTreeMap::new();
    let mut effective = 0usize;
    let mut failures = 0usize;

    for rep in 0..cfg.reps {
        let rep_stream = master.substream("rep").substream_index(rep as u64);
        let mut data_stream = rep_stream.substream("data");
        let split_stream = rep_stream.substream("splits");
        let outcome = match cfg.experiment {
            Experiment::Mean => gen_mean(cfg.n, &theta_mean, &mut data_stream).and_then(|x| {
                let backend = MeanBackend::new(&x);
                run_replicate(&backend, &sets, &cfg.l_values, cfg.alpha, &split_stream)
            }),
            Experiment::Regression => gen_regression_fixed_beta(cfg.n, &beta, &mut data_stream)
                .and_then(|(x, y)| {
                    let backend = RegressionBackend::new(&x, &y, DebiasConfig::default())?;
                    run_replicate(&backend, &sets, &cfg.l_values, cfg.alpha, &split_stream)
                }),
            Experiment::Factor => {
                gen_factor(cfg.n, cfg.p, cfg.q, cfg.s, cfg.rho, cfg.sigma_sq, &mut data_stream)
                    .and_then(|(x, _, _)| {
                        let backend = FactorBackend::new(&x, cfg.q)?;
                        run_replicate(&backend, &sets, &cfg.l_values, cfg.alpha, &split_stream)
                    })
            }
        };
        match outcome {
            Ok(results) => {
                effective += 1;
                for (key, reject) in results {
                    if reject {
                        *tallies.entry(key).or_insert(0) += 1;
                    } else {
                        tallies.entry(key).or_insert(0);
                    }
                }
            }
            Err(_) => failures += 1,
        }
    }
    if effective == 0 {
        return Err(Error::Domain(format!(
            "all {} replicates failed; nothing to tabulate",
            cfg.reps
        )));
    }
    let mut cells = BTreeMap::new();
    for (key, count) in tallies {
        let rate = count as f64 / effective as f64;
        let se = (rate * (1.0 - rate) / effective as f64).sqrt();
        cells.insert(key, SimCell { rate, reps: effective, se });
    }
    Ok(SimTable { cells, failures })
}
