// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

//! 64-bit item hashing.
//!
//! Sketches consume 64-bit digests; which function produced them is the
//! caller's choice. [`Murmur3`] is the default. [`Sha256Prefix`] exists so
//! that coefficients fitted under one hash can be checked under another.

use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

/// A deterministic map from item bytes to a 64-bit digest.
pub trait ItemHasher: Send + Sync {
    fn hash_bytes(&self, item: &[u8]) -> u64;
}

/// MurmurHash3 x64_128 with seed 0, truncated to its first 64-bit word.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Murmur3;

/// First eight bytes of SHA-256, read little-endian.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Sha256Prefix;

impl ItemHasher for Murmur3 {
    #[inline]
    fn hash_bytes(&self, item: &[u8]) -> u64 {
        murmur3_x64_128(item, 0).0
    }
}

impl ItemHasher for Sha256Prefix {
    fn hash_bytes(&self, item: &[u8]) -> u64 {
        let digest = Sha256::digest(item);
        let mut word = [0u8; 8];
        word.copy_from_slice(&digest[..8]);
        u64::from_le_bytes(word)
    }
}

/// Runtime selection between the built-in hashers.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HashAlgorithm {
    #[default]
    Murmur3,
    Sha256,
}

impl HashAlgorithm {
    pub fn name(self) -> &'static str {
        match self {
            HashAlgorithm::Murmur3 => "murmur3",
            HashAlgorithm::Sha256 => "sha256",
        }
    }
}

impl ItemHasher for HashAlgorithm {
    #[inline]
    fn hash_bytes(&self, item: &[u8]) -> u64 {
        match self {
            HashAlgorithm::Murmur3 => Murmur3.hash_bytes(item),
            HashAlgorithm::Sha256 => Sha256Prefix.hash_bytes(item),
        }
    }
}

impl fmt::Display for HashAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HashAlgorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "murmur3" => Ok(HashAlgorithm::Murmur3),
            "sha256" => Ok(HashAlgorithm::Sha256),
            other => Err(format!("unknown hash algorithm '{other}'")),
        }
    }
}

const C1: u64 = 0x87c3_7b91_1142_53d5;
const C2: u64 = 0x4cf5_ad43_2745_937f;

#[inline]
fn fmix64(mut k: u64) -> u64 {
    k ^= k >> 33;
    k = k.wrapping_mul(0xff51_afd7_ed55_8ccd);
    k ^= k >> 33;
    k = k.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    k ^= k >> 33;
    k
}

#[inline]
fn mix_k1(k1: u64) -> u64 {
    k1.wrapping_mul(C1).rotate_left(31).wrapping_mul(C2)
}

#[inline]
fn mix_k2(k2: u64) -> u64 {
    k2.wrapping_mul(C2).rotate_left(33).wrapping_mul(C1)
}

/// Reference MurmurHash3 x64_128. Returns `(h1, h2)`.
pub fn murmur3_x64_128(data: &[u8], seed: u64) -> (u64, u64) {
    let mut h1 = seed;
    let mut h2 = seed;

    let mut blocks = data.chunks_exact(16);
    for block in &mut blocks {
        let k1 = u64::from_le_bytes(block[..8].try_into().unwrap());
        let k2 = u64::from_le_bytes(block[8..].try_into().unwrap());

        h1 ^= mix_k1(k1);
        h1 = h1
            .rotate_left(27)
            .wrapping_add(h2)
            .wrapping_mul(5)
            .wrapping_add(0x52dc_e729);

        h2 ^= mix_k2(k2);
        h2 = h2
            .rotate_left(31)
            .wrapping_add(h1)
            .wrapping_mul(5)
            .wrapping_add(0x3849_5ab5);
    }

    let tail = blocks.remainder();
    if !tail.is_empty() {
        let mut k1 = 0u64;
        let mut k2 = 0u64;
        for (i, &b) in tail.iter().enumerate() {
            if i < 8 {
                k1 |= (b as u64) << (8 * i);
            } else {
                k2 |= (b as u64) << (8 * (i - 8));
            }
        }
        if tail.len() > 8 {
            h2 ^= mix_k2(k2);
        }
        h1 ^= mix_k1(k1);
    }

    let len = data.len() as u64;
    h1 ^= len;
    h2 ^= len;
    h1 = h1.wrapping_add(h2);
    h2 = h2.wrapping_add(h1);
    h1 = fmix64(h1);
    h2 = fmix64(h2);
    h1 = h1.wrapping_add(h2);
    h2 = h2.wrapping_add(h1);
    (h1, h2)
}
