// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

//! Empirical raw-estimate bias table for the HyperLogLog++ baseline.

use std::fmt::Write as _;
use std::path::Path;

use super::{map_trials, CalibrationSpec};
use crate::error::{Error, Result};
use crate::estimators::raw_estimate;

/// Bias of the raw estimate as a function of the raw estimate itself.
///
/// Knots are mean raw estimates; `lookup` interpolates linearly between them
/// and returns zero outside `[knots[0], knots[last]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasTable {
    knots: Vec<f64>,
    biases: Vec<f64>,
}

impl BiasTable {
    pub fn new(knots: Vec<f64>, biases: Vec<f64>) -> Result<Self> {
        if knots.len() != biases.len() {
            return Err(Error::InvalidCalibration(
                "bias table needs one bias per knot".into(),
            ));
        }
        if knots.len() < 2 {
            return Err(Error::InvalidCalibration(
                "bias table needs at least two knots".into(),
            ));
        }
        if knots.iter().chain(&biases).any(|v| !v.is_finite()) {
            return Err(Error::InvalidCalibration(
                "bias table values must be finite".into(),
            ));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCalibration(
                "bias table knots must be strictly increasing".into(),
            ));
        }
        Ok(Self { knots, biases })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    /// Raw-estimate range where a correction applies.
    pub fn range(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    pub fn lookup(&self, raw: f64) -> f64 {
        let (low, high) = self.range();
        if !(raw >= low && raw <= high) {
            return 0.0;
        }
        // First knot strictly greater than `raw`.
        let upper = self.knots.partition_point(|&k| k <= raw);
        if upper == self.knots.len() {
            return *self.biases.last().unwrap();
        }
        let lower = upper - 1;
        let (x0, x1) = (self.knots[lower], self.knots[upper]);
        let (y0, y1) = (self.biases[lower], self.biases[upper]);
        y0 + (y1 - y0) * (raw - x0) / (x1 - x0)
    }

    /// `knot,bias` lines at 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, b) in self.knots.iter().zip(&self.biases) {
            writeln!(out, "{k:.16e},{b:.16e}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        const WHAT: &str = "bias table";
        let mut knots = Vec::new();
        let mut biases = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (k, b) = line
                .split_once(',')
                .ok_or_else(|| Error::parse(WHAT, i + 1, "expected 'knot,bias'"))?;
            let parse = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::parse(WHAT, i + 1, format!("not a finite number: '{v}'")))
            };
            let (k, b) = (parse(k)?, parse(b)?);
            if knots.last().is_some_and(|&last| k <= last) {
                return Err(Error::parse(
                    WHAT,
                    i + 1,
                    "knots must be strictly increasing",
                ));
            }
            knots.push(k);
            biases.push(b);
        }
        if knots.len() < 2 {
            return Err(Error::parse(
                WHAT,
                text.lines().count().max(1),
                "need at least two rows",
            ));
        }
        Self::new(knots, biases)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Measures `mean(raw) - c` for every grid cardinality.
///
/// Knots are the mean raw estimates. A grid point whose mean raw estimate
/// does not exceed the previous knot is dropped to keep knots increasing.
pub fn derive_bias_table(spec: &CalibrationSpec) -> Result<BiasTable> {
    let config = spec.validate_grid()?;
    let raw = map_trials(
        config,
        spec.hash,
        &spec.grid,
        spec.trials,
        spec.base_seed,
        |_, sketch| raw_estimate(sketch).value,
    );
    let mut knots: Vec<f64> = Vec::with_capacity(spec.grid.len());
    let mut biases = Vec::with_capacity(spec.grid.len());
    for (&c, samples) in spec.grid.iter().zip(raw) {
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        if knots.last().is_some_and(|&last| mean <= last) {
            continue;
        }
        knots.push(mean);
        biases.push(mean - c as f64);
    }
    BiasTable::new(knots, biases)
}
