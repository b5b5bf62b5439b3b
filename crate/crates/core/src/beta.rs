// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

//! The bias-minimiser polynomial `beta(m, z)` and its text file format.
//!
//! ```text
//! beta(m, z) = b0*z + b1*z1 + b2*z1^2 + ... + bk*z1^k,   z1 = ln(z + 1)
//! ```
//!
//! Coefficient files are line oriented: a header `p=<int> k=<int>` followed
//! by `k + 1` decimal coefficients, `b0` first.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::sketch::SketchConfig;

/// The `p = 14`, `k = 7` coefficient set used for all `p = 14` estimation.
pub const PUBLISHED_P14_K7: [f64; 8] = [
    -0.370393914,
    0.070471823,
    0.17393686,
    0.16339839,
    -0.09237745,
    0.03738027,
    -0.005384159,
    0.00042419,
];

#[derive(Debug, Clone, PartialEq)]
pub struct BetaPolynomial {
    config: SketchConfig,
    coefficients: Vec<f64>,
}

impl BetaPolynomial {
    /// Builds a polynomial for precision `p` from `b0..=bk` (`k >= 1`).
    pub fn new(precision: u8, coefficients: Vec<f64>) -> Result<Self> {
        let config = SketchConfig::new(precision)?;
        if coefficients.len() < 2 {
            return Err(Error::InvalidPolynomial(format!(
                "need at least 2 coefficients, got {}",
                coefficients.len()
            )));
        }
        if let Some(bad) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidPolynomial(format!(
                "coefficient {bad} is not finite"
            )));
        }
        Ok(Self {
            config,
            coefficients,
        })
    }

    /// The embedded `p = 14` polynomial.
    pub fn published_p14() -> Self {
        Self::new(14, PUBLISHED_P14_K7.to_vec()).expect("embedded coefficients are valid")
    }

    /// Embedded coefficients for `precision`, if any ship with the crate.
    pub fn embedded(precision: u8) -> Option<Self> {
        (precision == 14).then(Self::published_p14)
    }

    #[inline]
    pub fn precision(&self) -> u8 {
        self.config.precision()
    }

    /// Register count this polynomial was fitted for.
    #[inline]
    pub fn m(&self) -> usize {
        self.config.m()
    }

    /// Degree `k` of the `z1` part.
    #[inline]
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    #[inline]
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Evaluates `beta(m, z)` with Horner's rule over the `z1` powers.
    /// Exactly zero at `z = 0`.
    pub fn eval(&self, z: usize) -> f64 {
        let z1 = ((z + 1) as f64).ln();
        let (linear, powers) = self.coefficients.split_first().expect("k >= 1");
        let mut acc = 0.0;
        for &c in powers.iter().rev() {
            acc = acc * z1 + c;
        }
        linear * z as f64 + acc * z1
    }

    /// Serialises to the coefficient file format (17 significant digits).
    pub fn to_text(&self) -> String {
        let mut out = format!("p={} k={}\n", self.precision(), self.degree());
        for c in &self.coefficients {
            writeln!(out, "{c:.16e}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        const WHAT: &str = "coefficient file";
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(WHAT, 1, "missing header"))?;
        let (p, k) = parse_header(header).ok_or_else(|| {
            Error::parse(
                WHAT,
                1,
                format!("expected 'p=<int> k=<int>', got '{header}'"),
            )
        })?;
        if k == 0 || k > 64 {
            return Err(Error::parse(
                WHAT,
                1,
                format!("k must be in 1..=64, got {k}"),
            ));
        }
        let precision = u8::try_from(p)
            .ok()
            .filter(|p| SketchConfig::new(*p).is_ok())
            .ok_or_else(|| Error::parse(WHAT, 1, format!("unsupported precision {p}")))?;

        let mut coefficients = Vec::with_capacity(k + 1);
        for (line_no, line) in lines {
            if line.is_empty() {
                continue;
            }
            if coefficients.len() == k + 1 {
                return Err(Error::parse(WHAT, line_no, "more coefficients than k + 1"));
            }
            let value: f64 = line
                .parse()
                .map_err(|_| Error::parse(WHAT, line_no, format!("not a number: '{line}'")))?;
            if !value.is_finite() {
                return Err(Error::parse(WHAT, line_no, "coefficient is not finite"));
            }
            coefficients.push(value);
        }
        if coefficients.len() != k + 1 {
            return Err(Error::parse(
                WHAT,
                text.lines().count().max(1),
                format!(
                    "expected {} coefficients, got {}",
                    k + 1,
                    coefficients.len()
                ),
            ));
        }
        Self::new(precision, coefficients)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

fn parse_header(header: &str) -> Option<(u32, usize)> {
    let mut parts = header.split_whitespace();
    let p = parts.next()?.strip_prefix("p=")?.parse().ok()?;
    let k = parts.next()?.strip_prefix("k=")?.parse().ok()?;
    parts.next().is_none().then_some((p, k))
}
