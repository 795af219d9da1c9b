use std::path::{Path, PathBuf};

use crate::beamforming::Method;
use crate::error::{Error, Result};
use crate::harness::sweep::{SweepAxis, TrialTable};

pub const TRIALS_FILE: &str = "trials.csv";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const PLOT_FILE: &str = "plot_results.py";

const TRIAL_HEADER: [&str; 12] = [
    "trial",
    "seed",
    "method",
    "snr_db",
    "K",
    "sinr_db",
    "optimal_sinr_db",
    "sv_corr",
    "sigma_n_hat",
    "sigma_1_hat",
    "solver_iters",
    "converged",
];

const AGGREGATE_HEADER: [&str; 6] = ["method", "x", "mean_sinr_db", "db_of_mean", "std_db", "n"];

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub method: Method,
    pub x: f64,
    /// Mean of per-trial SINR in dB.
    pub mean_sinr_db: f64,
    /// Per-trial SINR averaged in linear units, then converted to dB.
    pub db_of_mean: f64,
    /// Sample standard deviation of per-trial SINR in dB.
    pub std_db: f64,
    pub n: usize,
}

/// Per (method, sweep point) statistics, methods in order of first appearance.
pub fn aggregate(table: &TrialTable) -> Vec<AggregateRow> {
    let mut methods: Vec<Method> = Vec::new();
    let mut points: Vec<(usize, f64)> = Vec::new();
    for r in &table.rows {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
        if !points.iter().any(|p| p.0 == r.x_index) {
            points.push((r.x_index, table.x_value(r)));
        }
    }
    points.sort_by_key(|p| p.0);

    let mut out = Vec::new();
    for &method in &methods {
        for &(xi, x) in &points {
            let vals: Vec<f64> = table
                .rows
                .iter()
                .filter(|r| r.method == method && r.x_index == xi)
                .map(|r| r.output_sinr_db)
                .collect();
            if vals.is_empty() {
                continue;
            }
            let n = vals.len();
            let mean = vals.iter().sum::<f64>() / n as f64;
            let lin = vals.iter().map(|v| 10f64.powf(v / 10.0)).sum::<f64>() / n as f64;
            let std = if n > 1 {
                (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            out.push(AggregateRow { method, x, mean_sinr_db: mean, db_of_mean: 10.0 * lin.log10(), std_db: std, n });
        }
    }
    out
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone)]
pub struct EmittedFiles {
    pub trials: PathBuf,
    pub aggregate: PathBuf,
    pub plot_script: PathBuf,
}

/// Writes the per-trial CSV, the aggregated CSV and a matplotlib script that
/// plots the mean curves. Output depends only on the table.
pub fn emit_results(table: &TrialTable, out_dir: &Path) -> Result<EmittedFiles> {
    if table.rows.is_empty() {
        return Err(Error::InvalidInput("result table is empty".into()));
    }
    std::fs::create_dir_all(out_dir)?;

    let trials = out_dir.join(TRIALS_FILE);
    let mut w = csv::Writer::from_path(&trials)?;
    w.write_record(TRIAL_HEADER)?;
    for r in &table.rows {
        let d = &r.diagnostics;
        w.write_record([
            r.trial_index.to_string(),
            r.seed.to_string(),
            r.method.to_string(),
            r.snr_db.to_string(),
            r.k.to_string(),
            r.output_sinr_db.to_string(),
            r.optimal_sinr_db.to_string(),
            r.soi_sv_correlation.to_string(),
            opt(d.sigma_n_hat),
            opt(d.sigma_1_hat),
            opt(d.solver_iters),
            opt(d.converged),
        ])?;
    }
    w.flush()?;

    let aggregate_path = out_dir.join(AGGREGATE_FILE);
    let mut w = csv::Writer::from_path(&aggregate_path)?;
    w.write_record(AGGREGATE_HEADER)?;
    for a in aggregate(table) {
        w.write_record([
            a.method.to_string(),
            a.x.to_string(),
            a.mean_sinr_db.to_string(),
            a.db_of_mean.to_string(),
            a.std_db.to_string(),
            a.n.to_string(),
        ])?;
    }
    w.flush()?;

    let plot_script = out_dir.join(PLOT_FILE);
    std::fs::write(&plot_script, plot_script_source(table.axis))?;
    Ok(EmittedFiles { trials, aggregate: aggregate_path, plot_script })
}

fn plot_script_source(axis: SweepAxis) -> String {
    let (xlabel, png) = match axis {
        SweepAxis::Snr => ("SNR (dB)", "sinr_vs_snr.png"),
        SweepAxis::Snapshots => ("Number of snapshots", "sinr_vs_snapshots.png"),
    };
    format!(
        r#""""Plot mean output SINR curves from aggregate.csv in this directory."""
import csv
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
curves = defaultdict(list)
with open(os.path.join(here, "{AGGREGATE_FILE}"), newline="") as f:
    for row in csv.DictReader(f):
        curves[row["method"]].append((float(row["x"]), float(row["mean_sinr_db"])))

fig, ax = plt.subplots(figsize=(6, 4.5))
for method, pts in curves.items():
    pts.sort()
    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=method)
ax.set_xlabel("{xlabel}")
ax.set_ylabel("Output SINR (dB)")
ax.grid(True, alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(here, "{png}"), dpi=150)
"#
    )
}
