// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

//! Cardinality estimators over an [`HllSketch`] register vector.

use std::fmt;
use std::str::FromStr;

use crate::beta::BetaPolynomial;
use crate::calibration::BiasTable;
use crate::codec::Sketch;
use crate::error::{Error, Result};
use crate::mmv::{mmv_core_estimate, mmv_estimate};
use crate::sketch::HllSketch;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorKind {
    /// Classic HyperLogLog: raw formula with the Linear Counting switch.
    Hll,
    LogLogBeta,
    Mmv,
    /// HyperLogLog++ without sparse mode, using a locally derived bias table.
    HllPlusPlus,
    LinearCounting,
    /// Raw formula with no correction at all.
    Raw,
    /// Order-statistics core formula `m(m-1)/sum M[i]`.
    MmvCore,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 7] = [
        EstimatorKind::Hll,
        EstimatorKind::LogLogBeta,
        EstimatorKind::Mmv,
        EstimatorKind::HllPlusPlus,
        EstimatorKind::LinearCounting,
        EstimatorKind::Raw,
        EstimatorKind::MmvCore,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            EstimatorKind::Hll => "hll",
            EstimatorKind::LogLogBeta => "llb",
            EstimatorKind::Mmv => "mmv",
            EstimatorKind::HllPlusPlus => "hllpp",
            EstimatorKind::LinearCounting => "lc",
            EstimatorKind::Raw => "raw",
            EstimatorKind::MmvCore => "mmv-core",
        }
    }

    /// Whether the estimator reads an MMV sketch rather than an HLL one.
    pub fn uses_mmv_sketch(self) -> bool {
        matches!(self, EstimatorKind::Mmv | EstimatorKind::MmvCore)
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for EstimatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| format!("unknown estimator '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub estimator: EstimatorKind,
}

impl Estimate {
    fn new(value: f64, estimator: EstimatorKind) -> Self {
        Self { value, estimator }
    }
}

/// `alpha_m * m^2 / sum 2^-M[i]`.
pub fn raw_estimate(sketch: &HllSketch) -> Estimate {
    let config = sketch.config();
    let m = config.m() as f64;
    let value = config.alpha() * m * m / sketch.harmonic_denominator();
    Estimate::new(value, EstimatorKind::Raw)
}

/// `m * ln(m / z)`; requires `1 <= z <= m`.
pub fn linear_counting(m: usize, z: usize) -> Result<Estimate> {
    if z == 0 || z > m {
        return Err(Error::LinearCountingDomain { m, z });
    }
    let m = m as f64;
    Ok(Estimate::new(
        m * (m / z as f64).ln(),
        EstimatorKind::LinearCounting,
    ))
}

/// Linear Counting with the undefined `z = 0` case saturated at `z = 1`.
pub fn linear_counting_saturating(sketch: &HllSketch) -> Estimate {
    let m = sketch.config().m();
    let z = sketch.zero_count().max(1);
    linear_counting(m, z).expect("1 <= z <= m")
}

/// Raw estimate, handing off to Linear Counting below `5m/2` when `z > 0`.
pub fn hll_classic_estimate(sketch: &HllSketch) -> Estimate {
    let m = sketch.config().m();
    let raw = raw_estimate(sketch).value;
    let z = sketch.zero_count();
    let value = if raw < 2.5 * m as f64 && z > 0 {
        linear_counting(m, z).expect("0 < z <= m").value
    } else {
        raw
    };
    Estimate::new(value, EstimatorKind::Hll)
}

/// `alpha_m * m * (m - z) / (beta(m, z) + sum 2^-M[i])`.
pub fn loglog_beta_estimate(sketch: &HllSketch, poly: &BetaPolynomial) -> Result<Estimate> {
    let config = sketch.config();
    if poly.m() != config.m() {
        return Err(Error::RegisterCountMismatch {
            poly: poly.m(),
            sketch: config.m(),
        });
    }
    let m = config.m() as f64;
    let z = sketch.zero_count();
    let denominator = poly.eval(z) + sketch.harmonic_denominator();
    if denominator.is_nan() || denominator <= 0.0 {
        return Err(Error::NonPositiveDenominator(denominator));
    }
    let value = config.alpha() * m * (m - z as f64) / denominator;
    Ok(Estimate::new(value, EstimatorKind::LogLogBeta))
}

/// Linear Counting cut-over points of HyperLogLog++ for `p = 4..=18`.
const HLLPP_THRESHOLDS: [f64; 15] = [
    10.0, 20.0, 40.0, 80.0, 220.0, 400.0, 900.0, 1800.0, 3100.0, 6500.0, 11500.0, 20000.0, 50000.0,
    120000.0, 350000.0,
];

pub fn hllpp_linear_counting_threshold(precision: u8) -> f64 {
    HLLPP_THRESHOLDS[(precision - crate::sketch::MIN_PRECISION) as usize]
}

/// HyperLogLog++ (dense only) with an empirically derived bias table.
///
/// The raw estimate is bias-corrected inside the table's knot range. Linear
/// Counting wins whenever `z > 0` and its value is at or below the
/// precision's threshold.
pub fn hllpp_estimate(sketch: &HllSketch, bias: &BiasTable) -> Estimate {
    let config = sketch.config();
    let raw = raw_estimate(sketch).value;
    let corrected = raw - bias.lookup(raw);
    let z = sketch.zero_count();
    if z > 0 {
        let lc = linear_counting(config.m(), z).expect("0 < z <= m").value;
        if lc <= hllpp_linear_counting_threshold(config.precision()) {
            return Estimate::new(lc, EstimatorKind::HllPlusPlus);
        }
    }
    Estimate::new(corrected.max(0.0), EstimatorKind::HllPlusPlus)
}

/// Optional inputs some estimators need.
#[derive(Debug, Clone, Default)]
pub struct EstimatorResources {
    pub beta: Option<BetaPolynomial>,
    pub bias_table: Option<BiasTable>,
}

impl EstimatorResources {
    /// Embedded coefficients for `precision`, when available, and no bias table.
    pub fn embedded(precision: u8) -> Self {
        Self {
            beta: BetaPolynomial::embedded(precision),
            bias_table: None,
        }
    }

    /// Checks that `kind` can run against sketches of `precision`.
    pub fn check(&self, kind: EstimatorKind, precision: u8) -> Result<()> {
        match kind {
            EstimatorKind::LogLogBeta => {
                let poly = self
                    .beta
                    .as_ref()
                    .ok_or(Error::MissingCoefficients(precision))?;
                let m = 1usize << precision;
                if poly.m() != m {
                    return Err(Error::RegisterCountMismatch {
                        poly: poly.m(),
                        sketch: m,
                    });
                }
                Ok(())
            }
            EstimatorKind::HllPlusPlus if self.bias_table.is_none() => {
                Err(Error::MissingBiasTable(precision))
            }
            _ => Ok(()),
        }
    }
}

/// Applies any HLL-family estimator to a register vector.
pub fn estimate_hll(
    sketch: &HllSketch,
    kind: EstimatorKind,
    resources: &EstimatorResources,
) -> Result<Estimate> {
    let precision = sketch.config().precision();
    match kind {
        EstimatorKind::Hll => Ok(hll_classic_estimate(sketch)),
        EstimatorKind::Raw => Ok(raw_estimate(sketch)),
        EstimatorKind::LinearCounting => Ok(linear_counting_saturating(sketch)),
        EstimatorKind::LogLogBeta => {
            let poly = resources
                .beta
                .as_ref()
                .ok_or(Error::MissingCoefficients(precision))?;
            loglog_beta_estimate(sketch, poly)
        }
        EstimatorKind::HllPlusPlus => {
            let table = resources
                .bias_table
                .as_ref()
                .ok_or(Error::MissingBiasTable(precision))?;
            Ok(hllpp_estimate(sketch, table))
        }
        EstimatorKind::Mmv | EstimatorKind::MmvCore => Err(Error::KindMismatch {
            left: "hll",
            right: "mmv",
        }),
    }
}

/// Applies `kind` to whichever sketch family it reads.
pub fn estimate_sketch(
    sketch: &Sketch,
    kind: EstimatorKind,
    resources: &EstimatorResources,
) -> Result<Estimate> {
    match (sketch, kind) {
        (Sketch::Mmv(s), EstimatorKind::Mmv) => mmv_estimate(s),
        (Sketch::Mmv(s), EstimatorKind::MmvCore) => mmv_core_estimate(s),
        (Sketch::Hll(s), kind) => estimate_hll(s, kind, resources),
        (Sketch::Mmv(_), _) => Err(Error::KindMismatch {
            left: "mmv",
            right: "hll",
        }),
    }
}
