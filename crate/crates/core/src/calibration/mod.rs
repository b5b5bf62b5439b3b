// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

//! Empirical fitting of the `beta(m, z)` coefficients.
//!
//! For every grid cardinality `c`, many independent datasets are sketched.
//! Each sketch yields `z` and the target
//!
//! ```text
//! beta_hat = alpha_m * m * (m - z) / c - sum 2^-M[i]
//! ```
//!
//! i.e. the denominator correction that would make the estimate exact. The
//! per-cardinality means of `z` and `beta_hat` are then fitted by least
//! squares over the basis `{z, z1, z1^2, ..., z1^k}`.

mod bias;
mod dataset;
mod fit;

use std::fmt::Write as _;

use rayon::prelude::*;

pub use bias::{derive_bias_table, BiasTable};
pub use dataset::{generate_dataset, trial_seed, Dataset, DatasetItem};
pub use fit::{fit_beta, BetaFit};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::hash::{HashAlgorithm, ItemHasher};
use crate::sketch::{HllSketch, SketchConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationSpec {
    pub precision: u8,
    /// Polynomial degree `k`.
    pub degree: usize,
    pub grid: Vec<u64>,
    pub trials: u32,
    pub base_seed: u64,
    pub hash: HashAlgorithm,
}

impl CalibrationSpec {
    /// Grid `1000..=170000` step 1000 at `p = 14`, scaled in proportion to `m`
    /// for other precisions; 100 trials; `k = 7`.
    ///
    /// Where `170 * step` falls short of `m ln m` (p >= 15) the grid is
    /// extended with further steps until it reaches it.
    pub fn standard(precision: u8, base_seed: u64) -> Result<Self> {
        let config = SketchConfig::new(precision)?;
        let step = ((1_000 * config.m() as u64) / 16_384).max(1);
        let m = config.m() as f64;
        let needed = (m * m.ln() / step as f64).ceil() as u64;
        Ok(Self {
            precision,
            degree: 7,
            grid: GridSpec::new(step, needed.max(170) * step, step).points(),
            trials: 100,
            base_seed,
            hash: HashAlgorithm::Murmur3,
        })
    }

    /// Grid for a bias table: step `m / 8` up to `5 m`, 50 trials.
    pub fn bias_table(precision: u8, base_seed: u64) -> Result<Self> {
        let config = SketchConfig::new(precision)?;
        let m = config.m() as u64;
        Ok(Self {
            precision,
            degree: 1,
            grid: GridSpec::new(m / 8, 5 * m, m / 8).points(),
            trials: 50,
            base_seed,
            hash: HashAlgorithm::Murmur3,
        })
    }

    pub fn config(&self) -> Result<SketchConfig> {
        SketchConfig::new(self.precision)
    }

    fn validate_grid(&self) -> Result<SketchConfig> {
        let config = self.config()?;
        if self.trials == 0 {
            return Err(Error::InvalidCalibration(
                "trials must be at least 1".into(),
            ));
        }
        if self.grid.is_empty() {
            return Err(Error::InvalidCalibration(
                "cardinality grid is empty".into(),
            ));
        }
        if self.grid[0] == 0 {
            return Err(Error::InvalidCalibration(
                "grid cardinalities must be positive".into(),
            ));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCalibration(
                "grid must be strictly increasing".into(),
            ));
        }
        Ok(config)
    }

    /// Checks the invariants required before fitting a polynomial.
    ///
    /// Besides the basic grid checks: `k >= 1`, at least `10 (k + 1)` grid
    /// points, and a top cardinality of at least `m ln m`, where the expected
    /// number of empty registers drops below one.
    pub fn validate(&self) -> Result<SketchConfig> {
        let config = self.validate_grid()?;
        if self.degree == 0 {
            return Err(Error::InvalidCalibration(
                "degree k must be at least 1".into(),
            ));
        }
        let needed = 10 * (self.degree + 1);
        if self.grid.len() < needed {
            return Err(Error::InvalidCalibration(format!(
                "k = {} needs at least {needed} grid points, got {}",
                self.degree,
                self.grid.len()
            )));
        }
        let m = config.m() as f64;
        let top = *self.grid.last().unwrap() as f64;
        if top < m * m.ln() {
            return Err(Error::InvalidCalibration(format!(
                "largest cardinality {top} is below m ln m = {:.0}; the grid never empties z",
                m * m.ln()
            )));
        }
        Ok(config)
    }
}

/// Per-cardinality averages over the calibration trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationPoint {
    pub cardinality: u64,
    pub mean_zero_count: f64,
    pub mean_beta_hat: f64,
    pub trials: u32,
}

/// `alpha_m * m * (m - z) / c - sum 2^-M[i]` for a sketch of exactly `c`
/// distinct items.
pub fn beta_hat(sketch: &HllSketch, cardinality: u64) -> Result<f64> {
    if cardinality == 0 {
        return Err(Error::ZeroCardinality);
    }
    let config = sketch.config();
    let m = config.m() as f64;
    let z = sketch.zero_count() as f64;
    Ok(config.alpha() * m * (m - z) / cardinality as f64 - sketch.harmonic_denominator())
}

/// Sketches one trial dataset.
pub(crate) fn sketch_trial<H: ItemHasher + ?Sized>(
    config: SketchConfig,
    hasher: &H,
    seed: u64,
    cardinality: u64,
) -> HllSketch {
    let mut sketch = HllSketch::with_config(config);
    for item in generate_dataset(seed, cardinality) {
        sketch.insert(hasher, &item);
    }
    sketch
}

/// Runs `f` on every `(cardinality, trial)` sketch, in parallel, and returns
/// the results grouped by cardinality in grid and trial order.
pub(crate) fn map_trials<T, F>(
    config: SketchConfig,
    hash: HashAlgorithm,
    grid: &[u64],
    trials: u32,
    base_seed: u64,
    f: F,
) -> Vec<Vec<T>>
where
    T: Send,
    F: Fn(u64, &HllSketch) -> T + Sync,
{
    let trials = trials as usize;
    let flat: Vec<T> = (0..grid.len() * trials)
        .into_par_iter()
        .map(|job| {
            let c = grid[job / trials];
            let trial = (job % trials) as u64;
            let sketch = sketch_trial(config, &hash, trial_seed(base_seed, c, trial), c);
            f(c, &sketch)
        })
        .collect();
    let mut grouped = Vec::with_capacity(grid.len());
    let mut it = flat.into_iter();
    for _ in grid {
        grouped.push(it.by_ref().take(trials).collect());
    }
    grouped
}

pub fn collect_calibration_points(spec: &CalibrationSpec) -> Result<Vec<CalibrationPoint>> {
    let config = spec.validate_grid()?;
    let per_trial = map_trials(
        config,
        spec.hash,
        &spec.grid,
        spec.trials,
        spec.base_seed,
        |c, sketch| -> Result<(f64, f64)> {
            Ok((sketch.zero_count() as f64, beta_hat(sketch, c)?))
        },
    );
    spec.grid
        .iter()
        .zip(per_trial)
        .map(|(&cardinality, samples)| {
            let (mut z_sum, mut b_sum) = (0.0, 0.0);
            for sample in samples {
                let (z, b) = sample?;
                z_sum += z;
                b_sum += b;
            }
            let n = spec.trials as f64;
            Ok(CalibrationPoint {
                cardinality,
                mean_zero_count: z_sum / n,
                mean_beta_hat: b_sum / n,
                trials: spec.trials,
            })
        })
        .collect()
}

/// Collects points and fits a polynomial of degree `spec.degree`.
pub fn calibrate(spec: &CalibrationSpec) -> Result<(Vec<CalibrationPoint>, BetaFit)> {
    spec.validate()?;
    let points = collect_calibration_points(spec)?;
    let fit = fit_beta(&points, spec.precision, spec.degree)?;
    Ok((points, fit))
}

/// Human-readable companion report for a calibration run.
pub fn calibration_report(
    spec: &CalibrationSpec,
    points: &[CalibrationPoint],
    fit: &BetaFit,
) -> String {
    let mut out = String::new();
    let grid = match (spec.grid.first(), spec.grid.last()) {
        (Some(first), Some(last)) => format!("{first}..={last} ({} points)", spec.grid.len()),
        _ => "empty".to_string(),
    };
    writeln!(out, "p: {}", spec.precision).unwrap();
    writeln!(out, "k: {}", spec.degree).unwrap();
    writeln!(out, "hash: {}", spec.hash).unwrap();
    writeln!(out, "grid: {grid}").unwrap();
    writeln!(out, "trials: {}", spec.trials).unwrap();
    writeln!(out, "seed: {}", spec.base_seed).unwrap();
    writeln!(out, "residual_norm: {:e}", fit.residual_norm).unwrap();
    writeln!(out, "condition_number: {:e}", fit.condition_number).unwrap();
    writeln!(out).unwrap();
    writeln!(out, "cardinality,mean_z,mean_beta_hat,fitted_beta").unwrap();
    for p in points {
        writeln!(
            out,
            "{},{},{},{}",
            p.cardinality,
            p.mean_zero_count,
            p.mean_beta_hat,
            fit.eval_at_mean(p.mean_zero_count)
        )
        .unwrap();
    }
    out
}
