// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

//! Accuracy sweeps: many seeded datasets per cardinality, every requested
//! estimator applied to the same datasets, relative-error statistics and
//! histograms per `(estimator, cardinality)`.

mod histogram;
mod report;

use rayon::prelude::*;

pub use histogram::{histogram, Histogram};
pub use report::{emit_report, HISTOGRAM_FILE, METADATA_FILE, SUMMARY_FILE};

use crate::beta::BetaPolynomial;
use crate::calibration::{generate_dataset, trial_seed, BiasTable};
use crate::error::{Error, Result};
use crate::estimators::{estimate_hll, EstimatorKind, EstimatorResources};
use crate::grid::GridSpec;
use crate::hash::{HashAlgorithm, ItemHasher};
use crate::mmv::{mmv_core_estimate, mmv_estimate, MmvSketch};
use crate::sketch::{HllSketch, SketchConfig};

pub const DEFAULT_BINS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub precision: u8,
    pub estimators: Vec<EstimatorKind>,
    pub grid: Vec<u64>,
    pub trials: u32,
    pub base_seed: u64,
    pub hash: HashAlgorithm,
    pub bins: usize,
    pub beta: Option<BetaPolynomial>,
    pub bias_table: Option<BiasTable>,
}

impl BenchSpec {
    /// Murmur3 hashing, 30 bins, embedded coefficients when they exist for
    /// `precision`, no bias table.
    pub fn new(
        precision: u8,
        estimators: Vec<EstimatorKind>,
        grid: Vec<u64>,
        trials: u32,
        base_seed: u64,
    ) -> Self {
        Self {
            precision,
            estimators,
            grid,
            trials,
            base_seed,
            hash: HashAlgorithm::Murmur3,
            bins: DEFAULT_BINS,
            beta: BetaPolynomial::embedded(precision),
            bias_table: None,
        }
    }

    /// Grid `500..=200000` step 5000 with 100 trials.
    pub fn desk_scale(precision: u8, estimators: Vec<EstimatorKind>, base_seed: u64) -> Self {
        Self::new(
            precision,
            estimators,
            GridSpec::new(500, 200_000, 5_000).points(),
            100,
            base_seed,
        )
    }

    /// Grid `500..=200000` step 500 with 500 trials.
    pub fn full_scale(precision: u8, estimators: Vec<EstimatorKind>, base_seed: u64) -> Self {
        Self::new(
            precision,
            estimators,
            GridSpec::new(500, 200_000, 500).points(),
            500,
            base_seed,
        )
    }

    pub fn validate(&self) -> Result<SketchConfig> {
        let config = SketchConfig::new(self.precision)?;
        let fail = |msg: &str| Err(Error::InvalidBench(msg.to_string()));
        if self.trials == 0 {
            return fail("trials must be at least 1");
        }
        if self.grid.is_empty() {
            return fail("cardinality grid is empty");
        }
        if self.grid[0] == 0 {
            return fail("grid cardinalities must be positive");
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return fail("grid must be strictly increasing");
        }
        if self.estimators.is_empty() {
            return fail("no estimators requested");
        }
        let mut seen = self.estimators.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.estimators.len() {
            return fail("estimators listed more than once");
        }
        if self.bins == 0 {
            return fail("histogram needs at least one bin");
        }
        Ok(config)
    }

    fn resources(&self) -> EstimatorResources {
        EstimatorResources {
            beta: self.beta.clone(),
            bias_table: self.bias_table.clone(),
        }
    }
}

/// Statistics of one estimator at one cardinality.
#[derive(Debug, Clone, PartialEq)]
pub struct CardinalityStats {
    pub estimator: EstimatorKind,
    pub cardinality: u64,
    pub trials: u32,
    pub mean_rel_err: f64,
    pub mean_abs_rel_err: f64,
    /// Sample standard deviation (`n - 1` denominator); zero for one trial.
    pub stddev_rel_err: f64,
    pub mean_estimate: f64,
    /// Estimates in trial order.
    pub estimates: Vec<f64>,
    pub histogram: Histogram,
}

impl CardinalityStats {
    fn from_estimates(
        estimator: EstimatorKind,
        cardinality: u64,
        estimates: Vec<f64>,
        bins: usize,
    ) -> Result<Self> {
        let n = estimates.len() as f64;
        let c = cardinality as f64;
        let rel: Vec<f64> = estimates.iter().map(|e| (e - c) / c).collect();
        let mean_rel_err = rel.iter().sum::<f64>() / n;
        let mean_abs_rel_err = rel.iter().map(|r| r.abs()).sum::<f64>() / n;
        let stddev_rel_err = if estimates.len() > 1 {
            (rel.iter().map(|r| (r - mean_rel_err).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let mean_estimate = estimates.iter().sum::<f64>() / n;
        let histogram = histogram(&estimates, bins)?;
        Ok(Self {
            estimator,
            cardinality,
            trials: estimates.len() as u32,
            mean_rel_err,
            mean_abs_rel_err,
            stddev_rel_err,
            mean_estimate,
            estimates,
            histogram,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    pub spec: BenchSpec,
    /// Estimators actually evaluated, in request order.
    pub estimators: Vec<EstimatorKind>,
    /// Requested estimators that could not run, with the reason.
    pub unavailable: Vec<(EstimatorKind, String)>,
    /// Estimator-major, then grid order.
    pub rows: Vec<CardinalityStats>,
}

impl AccuracyReport {
    pub fn stats(&self, estimator: EstimatorKind, cardinality: u64) -> Option<&CardinalityStats> {
        self.rows
            .iter()
            .find(|r| r.estimator == estimator && r.cardinality == cardinality)
    }

    pub fn series(&self, estimator: EstimatorKind) -> impl Iterator<Item = &CardinalityStats> {
        self.rows.iter().filter(move |r| r.estimator == estimator)
    }
}

/// Sketches one trial dataset into whichever sketch families are needed.
fn sketch_trial(
    config: SketchConfig,
    hasher: &HashAlgorithm,
    seed: u64,
    cardinality: u64,
    want_hll: bool,
    want_mmv: bool,
) -> (Option<HllSketch>, Option<MmvSketch>) {
    let mut hll = want_hll.then(|| HllSketch::with_config(config));
    let mut mmv = want_mmv.then(|| MmvSketch::with_config(config));
    for item in generate_dataset(seed, cardinality) {
        let h = hasher.hash_bytes(&item);
        if let Some(s) = hll.as_mut() {
            s.insert_hash(h);
        }
        if let Some(s) = mmv.as_mut() {
            s.insert_hash(h);
        }
    }
    (hll, mmv)
}

/// Runs every `(cardinality, trial)` dataset through every available
/// estimator. Deterministic given `spec`; parallel over trials.
pub fn run_accuracy_sweep(spec: &BenchSpec) -> Result<AccuracyReport> {
    let config = spec.validate()?;
    let resources = spec.resources();

    let mut estimators = Vec::new();
    let mut unavailable = Vec::new();
    for &kind in &spec.estimators {
        match resources.check(kind, spec.precision) {
            Ok(()) => estimators.push(kind),
            Err(e @ Error::MissingBiasTable(_)) => unavailable.push((kind, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    if estimators.is_empty() {
        return Err(Error::InvalidBench(
            "no requested estimator is available".into(),
        ));
    }

    let want_hll = estimators.iter().any(|k| !k.uses_mmv_sketch());
    let want_mmv = estimators.iter().any(|k| k.uses_mmv_sketch());
    let trials = spec.trials as usize;

    let per_trial: Vec<Vec<f64>> = (0..spec.grid.len() * trials)
        .into_par_iter()
        .map(|job| -> Result<Vec<f64>> {
            let c = spec.grid[job / trials];
            let seed = trial_seed(spec.base_seed, c, (job % trials) as u64);
            let (hll, mmv) = sketch_trial(config, &spec.hash, seed, c, want_hll, want_mmv);
            estimators
                .iter()
                .map(|&kind| {
                    let estimate = match kind {
                        EstimatorKind::Mmv => mmv_estimate(mmv.as_ref().unwrap())?,
                        EstimatorKind::MmvCore => mmv_core_estimate(mmv.as_ref().unwrap())?,
                        _ => estimate_hll(hll.as_ref().unwrap(), kind, &resources)?,
                    };
                    Ok(estimate.value)
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(estimators.len() * spec.grid.len());
    for (e, &kind) in estimators.iter().enumerate() {
        for (ci, &c) in spec.grid.iter().enumerate() {
            let samples = per_trial[ci * trials..(ci + 1) * trials]
                .iter()
                .map(|row| row[e])
                .collect();
            rows.push(CardinalityStats::from_estimates(
                kind, c, samples, spec.bins,
            )?);
        }
    }

    Ok(AccuracyReport {
        spec: spec.clone(),
        estimators,
        unavailable,
        rows,
    })
}
