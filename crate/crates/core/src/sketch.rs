// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

//! Dense LogLog-family register vector.
//!
//! A 64-bit digest is split into a bucket index (the top `p` bits) and a
//! suffix `w` (the low `64 - p` bits). Each register keeps the largest
//! [`rho`] seen for its bucket. The estimators in [`crate::estimators`]
//! only ever read the register array.

use crate::codec::DecodeError;
use crate::error::{Error, Result};
use crate::hash::ItemHasher;

pub const MIN_PRECISION: u8 = 4;
pub const MAX_PRECISION: u8 = 18;

/// Precision `p`, register count `m = 2^p` and the matching `alpha_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SketchConfig {
    precision: u8,
    registers: usize,
    alpha: f64,
}

impl SketchConfig {
    pub fn new(precision: u8) -> Result<Self> {
        if !(MIN_PRECISION..=MAX_PRECISION).contains(&precision) {
            return Err(Error::InvalidPrecision(precision as u32));
        }
        let registers = 1usize << precision;
        Ok(Self {
            precision,
            registers,
            alpha: alpha(registers),
        })
    }

    #[inline]
    pub fn precision(&self) -> u8 {
        self.precision
    }

    /// Register count `m`.
    #[inline]
    pub fn m(&self) -> usize {
        self.registers
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Bit width of the hash suffix fed to [`rho`].
    #[inline]
    pub fn suffix_width(&self) -> u32 {
        64 - self.precision as u32
    }

    /// Largest value a register can hold: `(64 - p) + 1`.
    #[inline]
    pub fn max_register(&self) -> u8 {
        (self.suffix_width() + 1) as u8
    }
}

/// Bias-normalisation constant `alpha_m` (Flajolet et al., 2007).
///
/// `m` must be a power of two no smaller than 16.
pub fn alpha(m: usize) -> f64 {
    match m {
        16 => 0.673,
        32 => 0.697,
        64 => 0.709,
        _ => 0.7213 / (1.0 + 1.079 / m as f64),
    }
}

/// Leading zeros of the `width`-bit value `suffix`, plus one.
///
/// The all-zero suffix maps to `width + 1`. Bits of `suffix` above `width`
/// are ignored.
#[inline]
pub fn rho(suffix: u64, width: u32) -> u8 {
    debug_assert!((1..64).contains(&width));
    let aligned = suffix << (64 - width);
    (aligned.leading_zeros().min(width) + 1) as u8
}

/// `2^-r` for a register value, exact for every reachable `r`.
#[inline]
pub(crate) fn inverse_pow2(r: u8) -> f64 {
    f64::from_bits((1023 - r as u64) << 52)
}

/// Dense register vector: one byte per register.
#[derive(Debug, Clone, PartialEq)]
pub struct HllSketch {
    config: SketchConfig,
    registers: Vec<u8>,
}

impl HllSketch {
    pub fn new(precision: u8) -> Result<Self> {
        Ok(Self::with_config(SketchConfig::new(precision)?))
    }

    pub fn with_config(config: SketchConfig) -> Self {
        Self {
            config,
            registers: vec![0; config.m()],
        }
    }

    /// Rebuilds a sketch from raw registers, validating count and range.
    pub fn from_registers(config: SketchConfig, registers: Vec<u8>) -> Result<Self, DecodeError> {
        if registers.len() != config.m() {
            return Err(DecodeError::Length {
                expected: config.m(),
                actual: registers.len(),
            });
        }
        if let Some((index, &value)) = registers
            .iter()
            .enumerate()
            .find(|(_, &r)| r > config.max_register())
        {
            return Err(DecodeError::RegisterOutOfRange {
                index,
                value: value as f64,
            });
        }
        Ok(Self { config, registers })
    }

    #[inline]
    pub fn config(&self) -> &SketchConfig {
        &self.config
    }

    #[inline]
    pub fn registers(&self) -> &[u8] {
        &self.registers
    }

    /// Applies `M[i] = max(M[i], rho(w))` for the bucket selected by `hash`.
    #[inline]
    pub fn insert_hash(&mut self, hash: u64) {
        let width = self.config.suffix_width();
        let index = (hash >> width) as usize;
        let suffix = hash & ((1u64 << width) - 1);
        let value = rho(suffix, width);
        let slot = &mut self.registers[index];
        if value > *slot {
            *slot = value;
        }
    }

    #[inline]
    pub fn insert<H: ItemHasher + ?Sized>(&mut self, hasher: &H, item: &[u8]) {
        self.insert_hash(hasher.hash_bytes(item));
    }

    /// Register-wise maximum of two sketches with the same precision.
    pub fn merge(&self, other: &HllSketch) -> Result<HllSketch> {
        let mut out = self.clone();
        out.merge_from(other)?;
        Ok(out)
    }

    pub fn merge_from(&mut self, other: &HllSketch) -> Result<()> {
        if self.config.precision() != other.config.precision() {
            return Err(Error::PrecisionMismatch {
                left: self.config.precision(),
                right: other.config.precision(),
            });
        }
        for (dst, &src) in self.registers.iter_mut().zip(&other.registers) {
            *dst = (*dst).max(src);
        }
        Ok(())
    }

    /// Number of registers still at zero (`z`).
    pub fn zero_count(&self) -> usize {
        self.registers.iter().filter(|&&r| r == 0).count()
    }

    /// `sum_i 2^-M[i]`.
    pub fn harmonic_denominator(&self) -> f64 {
        self.registers.iter().map(|&r| inverse_pow2(r)).sum()
    }
}
