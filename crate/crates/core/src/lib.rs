// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

//! LogLog-β cardinality estimation.
//!
//! A single estimator over HyperLogLog registers that stays accurate from
//! tiny to large cardinalities without switching formulas or consulting
//! bias tables:
//!
//! ```text
//! E = alpha_m * m * (m - z) / (beta(m, z) + sum 2^-M[i])
//! ```
//!
//! where `z` is the number of empty registers and `beta` is a small
//! polynomial in `z` and `ln(z + 1)` fitted offline. The crate also provides
//! the classic HyperLogLog and HyperLogLog++ baselines, the MinHash-style
//! MMV sketch with its own `z` adjustment, a calibration pipeline that refits
//! `beta`, and an accuracy benchmark harness.
//!
//! ```
//! use loglog_beta::{estimators, BetaPolynomial, HashAlgorithm, HllSketch};
//!
//! let mut sketch = HllSketch::new(14).unwrap();
//! for i in 0u64..10_000 {
//!     sketch.insert(&HashAlgorithm::Murmur3, &i.to_le_bytes());
//! }
//! let beta = BetaPolynomial::published_p14();
//! let estimate = estimators::loglog_beta_estimate(&sketch, &beta).unwrap();
//! assert!((estimate.value - 10_000.0).abs() < 500.0);
//! ```

pub mod bench;
pub mod beta;
pub mod calibration;
pub mod codec;
pub mod error;
pub mod estimators;
pub mod grid;
pub mod hash;
pub mod mmv;
pub mod sketch;

pub use beta::BetaPolynomial;
pub use codec::{DecodeError, Sketch};
pub use error::{Error, Result};
pub use estimators::{Estimate, EstimatorKind, EstimatorResources};
pub use grid::GridSpec;
pub use hash::{HashAlgorithm, ItemHasher};
pub use mmv::MmvSketch;
pub use sketch::{HllSketch, SketchConfig};
