// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

use std::fmt::Write as _;
use std::path::Path;

use super::AccuracyReport;
use crate::error::{Error, Result};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const HISTOGRAM_FILE: &str = "histograms.csv";
pub const METADATA_FILE: &str = "metadata.txt";

fn summary_csv(report: &AccuracyReport) -> String {
    let p = report.spec.precision;
    let mut out = String::from(
        "estimator,p,cardinality,trials,mean_rel_err,mean_abs_rel_err,stddev_rel_err\n",
    );
    for r in &report.rows {
        writeln!(
            out,
            "{},{p},{},{},{},{},{}",
            r.estimator,
            r.cardinality,
            r.trials,
            r.mean_rel_err,
            r.mean_abs_rel_err,
            r.stddev_rel_err
        )
        .unwrap();
    }
    out
}

fn histogram_csv(report: &AccuracyReport) -> String {
    let p = report.spec.precision;
    let mut out = String::from("estimator,p,cardinality,bin_low,bin_high,count\n");
    for r in &report.rows {
        for (low, high, count) in r.histogram.iter() {
            writeln!(
                out,
                "{},{p},{},{low},{high},{count}",
                r.estimator, r.cardinality
            )
            .unwrap();
        }
    }
    out
}

fn metadata(report: &AccuracyReport) -> String {
    let spec = &report.spec;
    let mut out = String::new();
    let join = |v: &[crate::estimators::EstimatorKind]| {
        v.iter().map(|k| k.tag()).collect::<Vec<_>>().join(",")
    };
    writeln!(out, "p: {}", spec.precision).unwrap();
    writeln!(out, "hash: {}", spec.hash).unwrap();
    writeln!(out, "trials: {}", spec.trials).unwrap();
    writeln!(out, "seed: {}", spec.base_seed).unwrap();
    writeln!(out, "bins: {}", spec.bins).unwrap();
    writeln!(
        out,
        "grid: {}..={} ({} points)",
        spec.grid[0],
        spec.grid[spec.grid.len() - 1],
        spec.grid.len()
    )
    .unwrap();
    writeln!(out, "estimators: {}", join(&report.estimators)).unwrap();
    for (kind, reason) in &report.unavailable {
        writeln!(out, "unavailable: {kind} ({reason})").unwrap();
    }
    out
}

/// Writes `summary.csv`, `histograms.csv` and `metadata.txt` into `dir`,
/// creating it if needed.
pub fn emit_report(report: &AccuracyReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (name, body) in [
        (SUMMARY_FILE, summary_csv(report)),
        (HISTOGRAM_FILE, histogram_csv(report)),
        (METADATA_FILE, metadata(report)),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}
