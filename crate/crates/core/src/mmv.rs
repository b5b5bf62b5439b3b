// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

//! Mean-of-minimum-values (MMV) estimator.
//!
//! Each item hashes to `y` in `(0, 1)`. Bucket `i = floor(y*m)` keeps the
//! smallest fractional part `y*m - floor(y*m)` it has seen; untouched
//! buckets stay at exactly `1.0`.

use crate::codec::DecodeError;
use crate::error::{Error, Result};
use crate::estimators::{Estimate, EstimatorKind};
use crate::hash::ItemHasher;
use crate::sketch::SketchConfig;

/// Maps a 64-bit digest into the open unit interval.
///
/// The top 52 bits select one of `2^52` equal cells and the cell midpoint is
/// returned: `(floor(h / 2^12) + 0.5) / 2^52`. Every output is an exact
/// double strictly between 0 and 1.
#[inline]
pub fn hash_to_unit(hash: u64) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 52) as f64;
    ((hash >> 12) as f64 + 0.5) * SCALE
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmvSketch {
    config: SketchConfig,
    registers: Vec<f64>,
}

impl MmvSketch {
    pub fn new(precision: u8) -> Result<Self> {
        Ok(Self::with_config(SketchConfig::new(precision)?))
    }

    pub fn with_config(config: SketchConfig) -> Self {
        Self {
            config,
            registers: vec![1.0; config.m()],
        }
    }

    pub fn from_registers(config: SketchConfig, registers: Vec<f64>) -> Result<Self, DecodeError> {
        if registers.len() != config.m() {
            return Err(DecodeError::Length {
                expected: config.m(),
                actual: registers.len(),
            });
        }
        if let Some((index, &value)) = registers
            .iter()
            .enumerate()
            .find(|(_, r)| !(0.0..=1.0).contains(*r))
        {
            return Err(DecodeError::RegisterOutOfRange { index, value });
        }
        Ok(Self { config, registers })
    }

    #[inline]
    pub fn config(&self) -> &SketchConfig {
        &self.config
    }

    #[inline]
    pub fn registers(&self) -> &[f64] {
        &self.registers
    }

    /// Inserts a unit-interval hash value `y`.
    pub fn insert_unit(&mut self, y: f64) -> Result<()> {
        if !(y > 0.0 && y < 1.0) {
            return Err(Error::OutOfUnitInterval(y));
        }
        self.insert_unit_unchecked(y);
        Ok(())
    }

    #[inline]
    fn insert_unit_unchecked(&mut self, y: f64) {
        let scaled = y * self.config.m() as f64;
        let bucket = scaled.floor();
        let slot = &mut self.registers[bucket as usize];
        let fraction = scaled - bucket;
        if fraction < *slot {
            *slot = fraction;
        }
    }

    #[inline]
    pub fn insert_hash(&mut self, hash: u64) {
        self.insert_unit_unchecked(hash_to_unit(hash));
    }

    #[inline]
    pub fn insert<H: ItemHasher + ?Sized>(&mut self, hasher: &H, item: &[u8]) {
        self.insert_hash(hasher.hash_bytes(item));
    }

    /// Element-wise minimum of two sketches with the same precision.
    pub fn merge(&self, other: &MmvSketch) -> Result<MmvSketch> {
        let mut out = self.clone();
        out.merge_from(other)?;
        Ok(out)
    }

    pub fn merge_from(&mut self, other: &MmvSketch) -> Result<()> {
        if self.config.precision() != other.config.precision() {
            return Err(Error::PrecisionMismatch {
                left: self.config.precision(),
                right: other.config.precision(),
            });
        }
        for (dst, &src) in self.registers.iter_mut().zip(&other.registers) {
            *dst = dst.min(src);
        }
        Ok(())
    }

    /// Registers still at their initial value `1.0`.
    pub fn untouched_count(&self) -> usize {
        self.registers.iter().filter(|&&r| r == 1.0).count()
    }

    pub fn register_sum(&self) -> f64 {
        self.registers.iter().sum()
    }

    fn estimate_with(&self, numerator_offset: f64, kind: EstimatorKind) -> Result<Estimate> {
        let sum = self.register_sum();
        if sum.is_nan() || sum <= 0.0 {
            return Err(Error::NonPositiveDenominator(sum));
        }
        let m = self.config.m() as f64;
        Ok(Estimate {
            value: m * (m - numerator_offset) / sum,
            estimator: kind,
        })
    }
}

/// `m(m-1) / sum M[i]`.
pub fn mmv_core_estimate(sketch: &MmvSketch) -> Result<Estimate> {
    sketch.estimate_with(1.0, EstimatorKind::MmvCore)
}

/// `m(m-z) / sum M[i]` with `z` the untouched-register count.
pub fn mmv_estimate(sketch: &MmvSketch) -> Result<Estimate> {
    sketch.estimate_with(sketch.untouched_count() as f64, EstimatorKind::Mmv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::generate_dataset;
    use crate::hash::Murmur3;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn sketch_of(p: u8, seed: u64, cardinality: u64) -> MmvSketch {
        let mut s = MmvSketch::new(p).unwrap();
        for item in generate_dataset(seed, cardinality) {
            s.insert(&Murmur3, &item);
        }
        s
    }

    #[test]
    fn unit_mapping_edges() {
        assert_eq!(hash_to_unit(0), 2f64.powi(-53));
        assert!(hash_to_unit(0) > 0.0);
        assert_eq!(hash_to_unit(1 << 63), 0.5 + 2f64.powi(-53));
        assert_eq!(hash_to_unit(u64::MAX), 1.0 - 2f64.powi(-53));
        assert!(hash_to_unit(u64::MAX) < 1.0);
    }

    #[test]
    fn unit_mapping_is_uniform_on_average() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let n = 1_000_000;
        let mean = (0..n).map(|_| hash_to_unit(rng.random())).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.002, "{mean}");
    }

    #[test]
    fn insert_exact_arithmetic() {
        let mut s = MmvSketch::new(4).unwrap();
        s.insert_unit(0.5).unwrap();
        assert_eq!(s.registers()[8], 0.0);

        let mut s = MmvSketch::new(4).unwrap();
        s.insert_unit(0.53125).unwrap();
        assert_eq!(s.registers()[8], 0.5);
        let once = s.clone();
        s.insert_unit(0.53125).unwrap();
        assert_eq!(s, once);
    }

    #[test]
    fn insert_rejects_closed_endpoints() {
        let mut s = MmvSketch::new(4).unwrap();
        for y in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(s.insert_unit(y).is_err(), "{y}");
        }
    }

    #[test]
    fn closed_form_estimates() {
        let fresh = MmvSketch::new(4).unwrap();
        assert_eq!(mmv_core_estimate(&fresh).unwrap().value, 15.0);
        assert_eq!(mmv_estimate(&fresh).unwrap().value, 0.0);

        let config = SketchConfig::new(4).unwrap();
        let halves = MmvSketch::from_registers(config, vec![0.5; 16]).unwrap();
        assert_eq!(mmv_core_estimate(&halves).unwrap().value, 30.0);

        let zeros = MmvSketch::from_registers(config, vec![0.0; 16]).unwrap();
        assert!(mmv_core_estimate(&zeros).is_err());
        assert!(mmv_estimate(&zeros).is_err());
    }

    #[test]
    fn one_untouched_register_matches_core() {
        let config = SketchConfig::new(4).unwrap();
        let mut regs = vec![0.25; 16];
        regs[5] = 1.0;
        let s = MmvSketch::from_registers(config, regs).unwrap();
        assert_eq!(s.untouched_count(), 1);
        assert_eq!(
            mmv_estimate(&s).unwrap().value,
            mmv_core_estimate(&s).unwrap().value
        );
    }

    #[test]
    fn seeded_regression_fixtures() {
        let s = sketch_of(14, 11, 200_000);
        let core = mmv_core_estimate(&s).unwrap().value;
        assert!((core / 200_000.0 - 1.0).abs() < 0.03, "{core}");
        assert_eq!(core, CORE_200K);

        let s = sketch_of(14, 11, 1_000);
        let e = mmv_estimate(&s).unwrap().value;
        assert!((e / 1_000.0 - 1.0).abs() < 0.05, "{e}");
        assert_eq!(e, MMV_1K);
    }

    const CORE_200K: f64 = 202331.19560920994;
    const MMV_1K: f64 = 1000.3787038200539;

    #[test]
    fn untouched_count_tracks_buckets() {
        let mut s = MmvSketch::new(10).unwrap();
        let mut touched = HashSet::new();
        for item in generate_dataset(5, 3_000) {
            let h = Murmur3.hash_bytes(&item);
            touched.insert((hash_to_unit(h) * 1024.0).floor() as usize);
            s.insert_hash(h);
        }
        assert_eq!(s.untouched_count(), 1024 - touched.len());
    }

    #[test]
    fn merge_is_min_union() {
        let a = sketch_of(8, 1, 300);
        let b = sketch_of(8, 2, 300);
        let mut both = MmvSketch::new(8).unwrap();
        for seed in [1, 2] {
            for item in generate_dataset(seed, 300) {
                both.insert(&Murmur3, &item);
            }
        }
        assert_eq!(a.merge(&b).unwrap(), both);
        assert!(a.merge(&MmvSketch::new(9).unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn registers_monotone_and_order_free(hashes in prop::collection::vec(any::<u64>(), 1..200)) {
            let mut s = MmvSketch::new(6).unwrap();
            for &h in &hashes {
                let before = s.registers().to_vec();
                s.insert_hash(h);
                for (a, b) in before.iter().zip(s.registers()) {
                    prop_assert!(b <= a);
                    prop_assert!((0.0..1.0).contains(b) || *b == 1.0);
                }
            }
            let mut reversed = MmvSketch::new(6).unwrap();
            for &h in hashes.iter().rev().chain(&hashes) {
                reversed.insert_hash(h);
            }
            prop_assert_eq!(s, reversed);
        }
    }
}
