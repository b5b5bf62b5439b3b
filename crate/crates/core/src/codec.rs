// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

//! Binary sketch envelope.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "LLB1"
//! 4       1     format version (1)
//! 5       1     kind (0 = HLL, 1 = MMV)
//! 6       1     precision p
//! 7       1     reserved (0)
//! 8       ...   HLL: m register bytes
//!               MMV: m little-endian IEEE-754 doubles
//! ```

use std::path::Path;

use crate::error::{Error, Result};
use crate::mmv::MmvSketch;
use crate::sketch::{HllSketch, SketchConfig};

pub const MAGIC: [u8; 4] = *b"LLB1";
pub const FORMAT_VERSION: u8 = 1;
pub const HEADER_LEN: usize = 8;

const KIND_HLL: u8 = 0;
const KIND_MMV: u8 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DecodeError {
    #[error("input shorter than the {HEADER_LEN}-byte header ({0} bytes)")]
    Truncated(usize),
    #[error("bad magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),
    #[error("unknown sketch kind {0}")]
    UnknownKind(u8),
    #[error("unsupported precision {0}")]
    BadPrecision(u8),
    #[error("reserved byte must be zero, got {0}")]
    Reserved(u8),
    #[error("register payload has {actual} entries/bytes, expected {expected}")]
    Length { expected: usize, actual: usize },
    #[error("register {index} holds out-of-range value {value}")]
    RegisterOutOfRange { index: usize, value: f64 },
}

/// Either sketch family, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub enum Sketch {
    Hll(HllSketch),
    Mmv(MmvSketch),
}

impl Sketch {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Sketch::Hll(_) => "hll",
            Sketch::Mmv(_) => "mmv",
        }
    }

    pub fn config(&self) -> &SketchConfig {
        match self {
            Sketch::Hll(s) => s.config(),
            Sketch::Mmv(s) => s.config(),
        }
    }

    pub fn insert_hash(&mut self, hash: u64) {
        match self {
            Sketch::Hll(s) => s.insert_hash(hash),
            Sketch::Mmv(s) => s.insert_hash(hash),
        }
    }

    /// Union: register max for HLL, register min for MMV.
    pub fn merge_from(&mut self, other: &Sketch) -> Result<()> {
        match (self, other) {
            (Sketch::Hll(a), Sketch::Hll(b)) => a.merge_from(b),
            (Sketch::Mmv(a), Sketch::Mmv(b)) => a.merge_from(b),
            (a, b) => Err(Error::KindMismatch {
                left: a.kind_name(),
                right: b.kind_name(),
            }),
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let config = self.config();
        let (kind, payload_len) = match self {
            Sketch::Hll(_) => (KIND_HLL, config.m()),
            Sketch::Mmv(_) => (KIND_MMV, config.m() * 8),
        };
        let mut out = Vec::with_capacity(HEADER_LEN + payload_len);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&[FORMAT_VERSION, kind, config.precision(), 0]);
        match self {
            Sketch::Hll(s) => out.extend_from_slice(s.registers()),
            Sketch::Mmv(s) => {
                for r in s.registers() {
                    out.extend_from_slice(&r.to_le_bytes());
                }
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Sketch, DecodeError> {
        if bytes.len() < HEADER_LEN {
            return Err(DecodeError::Truncated(bytes.len()));
        }
        let (header, payload) = bytes.split_at(HEADER_LEN);
        let magic: [u8; 4] = header[..4].try_into().unwrap();
        if magic != MAGIC {
            return Err(DecodeError::BadMagic(magic));
        }
        let [version, kind, precision, reserved] = header[4..8].try_into().unwrap();
        if version != FORMAT_VERSION {
            return Err(DecodeError::UnsupportedVersion(version));
        }
        if kind > KIND_MMV {
            return Err(DecodeError::UnknownKind(kind));
        }
        let config =
            SketchConfig::new(precision).map_err(|_| DecodeError::BadPrecision(precision))?;
        if reserved != 0 {
            return Err(DecodeError::Reserved(reserved));
        }
        match kind {
            KIND_HLL => {
                if payload.len() != config.m() {
                    return Err(DecodeError::Length {
                        expected: config.m(),
                        actual: payload.len(),
                    });
                }
                HllSketch::from_registers(config, payload.to_vec()).map(Sketch::Hll)
            }
            _ => {
                if payload.len() != config.m() * 8 {
                    return Err(DecodeError::Length {
                        expected: config.m() * 8,
                        actual: payload.len(),
                    });
                }
                let registers = payload
                    .chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                    .collect();
                MmvSketch::from_registers(config, registers).map(Sketch::Mmv)
            }
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.encode()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Sketch> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(Sketch::decode(&bytes)?)
    }
}

impl From<HllSketch> for Sketch {
    fn from(s: HllSketch) -> Self {
        Sketch::Hll(s)
    }
}

impl From<MmvSketch> for Sketch {
    fn from(s: MmvSketch) -> Self {
        Sketch::Mmv(s)
    }
}
