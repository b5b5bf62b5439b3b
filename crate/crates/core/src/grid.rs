// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

use std::str::FromStr;

/// An arithmetic cardinality grid `start, start + step, ...` up to `stop`
/// inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub start: u64,
    pub stop: u64,
    pub step: u64,
}

impl GridSpec {
    pub fn new(start: u64, stop: u64, step: u64) -> Self {
        Self { start, stop, step }
    }

    /// Expands the grid. Empty when `step == 0` or `start > stop`.
    pub fn points(&self) -> Vec<u64> {
        if self.step == 0 || self.start > self.stop {
            return Vec::new();
        }
        (self.start..=self.stop)
            .step_by(self.step as usize)
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = String;

    /// Parses `start:stop:step`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(format!("expected start:stop:step, got '{s}'"));
        };
        let num = |v: &str| {
            v.trim()
                .replace('_', "")
                .parse::<u64>()
                .map_err(|_| format!("'{v}' is not a non-negative integer"))
        };
        let grid = GridSpec::new(num(start)?, num(stop)?, num(step)?);
        if grid.step == 0 {
            return Err("grid step must be positive".into());
        }
        if grid.start > grid.stop {
            return Err(format!(
                "grid start {} exceeds stop {}",
                grid.start, grid.stop
            ));
        }
        Ok(grid)
    }
}
