//! Subcommand implementations: test, simulate, tune.

use crate::io::{self, CsvInput};
use crate::{CliError, Mode, Model, SimulateArgs, TestArgs, TuneArgs};
use serde_json::{json, Value};
use std::fs;
use std::path::Path;
use std::time::Instant;
use tosi::engine::{tosi_multi, EstimatorBackend, TestMode};
use tosi::estimators::factor::FactorBackend;
use tosi::estimators::mean::MeanBackend;
use tosi::estimators::regression::{lasso_cd, DebiasConfig, RegressionBackend};
use tosi::harness::sim::{run_size_power, Experiment, SimConfig};
use tosi::numerics::{DataMatrix, RngStream};
use tosi::tuning::select_lambda_tosi;

fn from_tosi(e: tosi::Error) -> CliError {
    match &e {
        tosi::Error::Domain(_) => CliError::input(e.to_string()),
        _ => CliError::numeric(e.to_string()),
    }
}

fn input_summary(csv: &CsvInput) -> Value {
    json!({
        "path": csv.path,
        "sha256": csv.sha256,
        "rows": csv.data.nrows(),
        "cols": csv.data.ncols(),
    })
}

fn write_report(out: Option<&Path>, report: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::numeric(format!("cannot serialize report: {e}")))?;
    match out {
        Some(path) => fs::write(path, text.as_bytes())
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Splits a loaded CSV into the named response column and the remaining
/// predictor columns (kept in file order).
fn split_response(csv: &CsvInput, response: &str) -> Result<(DataMatrix, Vec<f64>), CliError> {
    let target = csv
        .headers
        .iter()
        .position(|h| h == response)
        .ok_or_else(|| {
            CliError::input(format!(
                "{}: no column named '{response}' (columns: {})",
                csv.path,
                csv.headers.join(", ")
            ))
        })?;
    if csv.data.ncols() < 2 {
        return Err(CliError::input(format!("{}: no predictor columns besides the response", csv.path)));
    }
    let n = csv.data.nrows();
    let y: Vec<f64> = (0..n).map(|i| csv.data.get(i, target)).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..csv.data.ncols())
                .filter(|&j| j != target)
                .map(|j| csv.data.get(i, j))
                .collect()
        })
        .collect();
    let x = DataMatrix::from_rows(&rows).map_err(from_tosi)?;
    Ok((x, y))
}

pub fn cmd_test(args: &TestArgs, threads: usize, command: &str) -> Result<(), CliError> {
    let started = Instant::now();
    let csv = io::read_csv(&args.data)?;
    let seed = args.seed.unwrap_or_else(crate::entropy_seed);

    // Resolve the design matrix and backend per model.
    let (design, y): (DataMatrix, Option<Vec<f64>>) = match args.model {
        Model::Mean | Model::Factor => (csv.data.clone(), None),
        Model::Regression => {
            let response = args.response.as_deref().ok_or_else(|| {
                CliError::input("regression model requires --response <column name>".into())
            })?;
            let (x, y) = split_response(&csv, response)?;
            (x, Some(y))
        }
    };
    let backend: Box<dyn EstimatorBackend> = match args.model {
        Model::Mean => Box::new(MeanBackend::new(&design)),
        Model::Regression => Box::new(
            RegressionBackend::new(&design, y.as_deref().unwrap(), DebiasConfig::default())
                .map_err(from_tosi)?,
        ),
        Model::Factor => {
            let q = args
                .q
                .ok_or_else(|| CliError::input("factor model requires --q <factor count>".into()))?;
            Box::new(FactorBackend::new(&design, q).map_err(from_tosi)?)
        }
    };
    let p = design.ncols();

    // Which (mode, set file) pairs to run.
    let mut runs: Vec<(TestMode, &Path)> = Vec::new();
    if matches!(args.mode, Mode::Tomax | Mode::Both) {
        let path = args.zero_set.as_deref().ok_or_else(|| {
            CliError::input("ToMax needs --zero-set <file> (assumed-zero indices)".into())
        })?;
        runs.push((TestMode::Max, path));
    }
    if matches!(args.mode, Mode::Tomin | Mode::Both) {
        let path = args.nonzero_set.as_deref().ok_or_else(|| {
            CliError::input("ToMin needs --nonzero-set <file> (assumed-nonzero indices)".into())
        })?;
        runs.push((TestMode::Min, path));
    }

    let master = RngStream::new(seed, "cli-test");
    let mut results = Vec::new();
    for (mode, set_path) in runs {
        let g = io::read_set_file(set_path, p)?;
        let label = match mode {
            TestMode::Max => "tomax",
            TestMode::Min => "tomin",
        };
        let mut stream = master.substream(label);
        let res = tosi_multi(backend.as_ref(), &g, mode, args.splits, args.alpha, &mut stream)
            .map_err(from_tosi)?;
        let mut entry = serde_json::to_value(&res)
            .map_err(|e| CliError::numeric(format!("cannot serialize result: {e}")))?;
        let obj = entry.as_object_mut().unwrap();
        obj.insert("set_file".into(), json!(set_path.display().to_string()));
        obj.insert("set_size".into(), json!(g.len()));
        obj.insert("splits".into(), json!(args.splits));
        results.push(entry);
    }

    let report = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "model": format!("{:?}", args.model).to_lowercase(),
        "seed": seed,
        "threads": threads,
        "inputs": [input_summary(&csv)],
        "results": results,
        "timing_ms": started.elapsed().as_millis() as u64,
    });
    write_report(args.out.as_deref(), &report)
}

pub fn cmd_simulate(args: &SimulateArgs, threads: usize, command: &str) -> Result<(), CliError> {
    let _ = threads; // the harness is sequential; the flag caps, never raises
    let (experiment, name, n0, p0, s0) = match args.experiment.as_str() {
        "mean" => (Experiment::Mean, "mean", 100, 200, 5),
        "exp1" | "regression" => (Experiment::Regression, "exp1", 100, 200, 5),
        "exp2" | "factor" => (Experiment::Factor, "exp2", 200, 150, 70),
        other => {
            return Err(CliError::input(format!(
                "unknown experiment '{other}' (expected mean, exp1/regression, or exp2/factor)"
            )));
        }
    };
    let seed = args.seed.unwrap_or_else(crate::entropy_seed);
    let all_gsets: Vec<String> = (1..=2)
        .flat_map(|fam| (1..=6).map(move |k| format!("G{fam}{k}")))
        .collect();
    let cfg = SimConfig {
        experiment,
        n: args.n.unwrap_or(n0),
        p: args.p.unwrap_or(p0),
        s: args.s.unwrap_or(s0),
        q: args.q.unwrap_or(1),
        rho: args.rho.unwrap_or(0.3),
        sigma_sq: args.sigma_sq.unwrap_or(1.0),
        l_values: if args.l.is_empty() { vec![1, 8] } else { args.l.clone() },
        alpha: args.alpha,
        reps: args.reps,
        seed,
        gset_labels: if args.gset.is_empty() { all_gsets } else { args.gset.clone() },
    };
    let table = run_size_power(&cfg).map_err(from_tosi)?;
    let cells: Vec<Value> = table
        .cells
        .iter()
        .map(|((gset, method, l, n), cell)| {
            json!({
                "gset": gset,
                "method": method,
                "L": l,
                "n": n,
                "rate": cell.rate,
                "se": cell.se,
                "reps": cell.reps,
            })
        })
        .collect();
    let report = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": name,
        "config": {
            "n": cfg.n,
            "p": cfg.p,
            "s": cfg.s,
            "q": cfg.q,
            "rho": cfg.rho,
            "sigma_sq": cfg.sigma_sq,
            "l_values": cfg.l_values,
            "alpha": cfg.alpha,
            "reps": cfg.reps,
            "gsets": cfg.gset_labels,
        },
        "seed": seed,
        "cells": cells,
        "failures": table.failures,
    });
    write_report(args.out.as_deref(), &report)
}

pub fn cmd_tune(args: &TuneArgs, threads: usize, command: &str) -> Result<(), CliError> {
    let _ = threads;
    let main_csv = io::read_csv(&args.main)?;
    let extra_csv = io::read_csv(&args.extra)?;
    if main_csv.sha256 == extra_csv.sha256 && !args.allow_overlap {
        return Err(CliError::input(format!(
            "main and extra files have identical content (sha256 {}); an independent \
             extra sample is required — pass --allow-overlap to proceed anyway",
            main_csv.sha256
        )));
    }
    let (xm, ym) = split_response(&main_csv, &args.response)?;
    let (xe, ye) = split_response(&extra_csv, &args.response)?;
    if xm.ncols() != xe.ncols() {
        return Err(CliError::input(format!(
            "main has {} predictors but extra has {}",
            xm.ncols(),
            xe.ncols()
        )));
    }
    let grid = io::parse_grid(&args.grid)?;
    let seed = args.seed.unwrap_or_else(crate::entropy_seed);
    let mut stream = RngStream::new(seed, "cli-tune");
    let outcome =
        select_lambda_tosi(&xm, &ym, &xe, &ye, &grid, args.alpha, args.splits, &mut stream)
            .map_err(from_tosi)?;
    // The selected support on the extra sample, for convenience.
    let support: Option<Vec<usize>> = match outcome.lambda_star {
        Some(l) => Some(lasso_cd(&xe, &ye, l).map_err(from_tosi)?.support()),
        None => None,
    };
    let report = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "inputs": [input_summary(&main_csv), input_summary(&extra_csv)],
        "outcome": serde_json::to_value(&outcome)
            .map_err(|e| CliError::numeric(format!("cannot serialize outcome: {e}")))?,
        "selected_support": support,
    });
    write_report(args.out.as_deref(), &report)
}
