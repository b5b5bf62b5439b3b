// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

//! Synthetic distinct-item streams.
//!
//! Item `i` of the stream with seed `s` is the 16 bytes
//! `s.to_le_bytes() ++ i.to_le_bytes()`. Items within a stream are distinct by
//! construction, and streams with different seeds share no items.

/// Item type produced by [`generate_dataset`].
pub type DatasetItem = [u8; 16];

/// Iterator over `cardinality` pairwise-distinct items.
#[derive(Debug, Clone)]
pub struct Dataset {
    seed: [u8; 8],
    next: u64,
    end: u64,
}

pub fn generate_dataset(seed: u64, cardinality: u64) -> Dataset {
    Dataset {
        seed: seed.to_le_bytes(),
        next: 0,
        end: cardinality,
    }
}

impl Iterator for Dataset {
    type Item = DatasetItem;

    #[inline]
    fn next(&mut self) -> Option<DatasetItem> {
        if self.next == self.end {
            return None;
        }
        let mut item = [0u8; 16];
        item[..8].copy_from_slice(&self.seed);
        item[8..].copy_from_slice(&self.next.to_le_bytes());
        self.next += 1;
        Some(item)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Dataset {}

#[inline]
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of the dataset for `(cardinality, trial)` under `base_seed`.
///
/// Depends only on these three values, so every estimator evaluated on the
/// same trial sees the same dataset.
pub fn trial_seed(base_seed: u64, cardinality: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base_seed) ^ cardinality) ^ trial)
}
