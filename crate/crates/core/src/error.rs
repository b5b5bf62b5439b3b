// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

use std::path::PathBuf;

use crate::codec::DecodeError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("precision must be in 4..=18, got {0}")]
    InvalidPrecision(u32),

    #[error("precision mismatch: {left} vs {right}")]
    PrecisionMismatch { left: u8, right: u8 },

    #[error("sketch kind mismatch: {left} vs {right}")]
    KindMismatch {
        left: &'static str,
        right: &'static str,
    },

    #[error("unit-interval value must lie in (0, 1), got {0}")]
    OutOfUnitInterval(f64),

    #[error("linear counting requires 1 <= z <= m (z = {z}, m = {m})")]
    LinearCountingDomain { m: usize, z: usize },

    #[error("estimator denominator is not positive ({0})")]
    NonPositiveDenominator(f64),

    #[error("beta polynomial fitted for m = {poly} cannot be applied to m = {sketch}")]
    RegisterCountMismatch { poly: usize, sketch: usize },

    #[error("invalid beta polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("cardinality must be positive")]
    ZeroCardinality,

    #[error("least-squares design matrix is rank deficient (condition number {condition:e})")]
    RankDeficient { condition: f64 },

    #[error("invalid calibration spec: {0}")]
    InvalidCalibration(String),

    #[error("invalid bench spec: {0}")]
    InvalidBench(String),

    #[error("no beta coefficients available for p = {0}; supply a coefficient file")]
    MissingCoefficients(u8),

    #[error("no bias table available for p = {0}")]
    MissingBiasTable(u8),

    #[error("histogram needs at least one finite sample and one bin")]
    EmptySamples,

    #[error("{what} line {line}: {message}")]
    Parse {
        what: &'static str,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Decode(#[from] DecodeError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(what: &'static str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            what,
            line,
            message: message.into(),
        }
    }
}
