// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

use nalgebra::{DMatrix, DVector};

use super::CalibrationPoint;
use crate::beta::BetaPolynomial;
use crate::error::{Error, Result};

/// A fitted polynomial with its least-squares diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaFit {
    pub polynomial: BetaPolynomial,
    /// Euclidean norm of `A * beta - beta_hat` over the calibration points.
    pub residual_norm: f64,
    /// 2-norm condition number of the column-equilibrated design matrix.
    pub condition_number: f64,
}

impl BetaFit {
    /// The fitted basis evaluated at a (possibly fractional) mean `z`.
    pub fn eval_at_mean(&self, z: f64) -> f64 {
        let coefficients = self.polynomial.coefficients();
        design_row(z, coefficients.len() - 1)
            .iter()
            .zip(coefficients)
            .map(|(x, c)| x * c)
            .sum()
    }
}

/// `[z, z1, z1^2, ..., z1^k]` with `z1 = ln(z + 1)`.
fn design_row(z: f64, degree: usize) -> Vec<f64> {
    let z1 = z.ln_1p();
    let mut row = Vec::with_capacity(degree + 1);
    row.push(z);
    let mut power = z1;
    for _ in 0..degree {
        row.push(power);
        power *= z1;
    }
    row
}

/// Least-squares fit of `beta(m, z)` of degree `degree` to the points' mean
/// `z` and mean `beta_hat`.
///
/// Columns are scaled to unit norm and the system is solved through a
/// Householder QR factorisation. Needs at least `degree + 2` points.
pub fn fit_beta(points: &[CalibrationPoint], precision: u8, degree: usize) -> Result<BetaFit> {
    if degree == 0 {
        return Err(Error::InvalidCalibration(
            "degree k must be at least 1".into(),
        ));
    }
    if points.len() < degree + 2 {
        return Err(Error::InvalidCalibration(format!(
            "k = {degree} needs at least {} points, got {}",
            degree + 2,
            points.len()
        )));
    }
    let rows = points.len();
    let cols = degree + 1;

    let design = DMatrix::from_fn(rows, cols, |i, j| {
        design_row(points[i].mean_zero_count, degree)[j]
    });
    let target = DVector::from_iterator(rows, points.iter().map(|p| p.mean_beta_hat));
    if design.iter().chain(target.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidCalibration(
            "non-finite calibration point".into(),
        ));
    }

    let scales: Vec<f64> = design.column_iter().map(|c| c.norm()).collect();
    if scales.contains(&0.0) {
        return Err(Error::RankDeficient {
            condition: f64::INFINITY,
        });
    }
    let mut scaled = design.clone();
    for (j, &s) in scales.iter().enumerate() {
        scaled.column_mut(j).unscale_mut(s);
    }

    let singular = scaled.clone().singular_values();
    let (s_max, s_min) = singular
        .iter()
        .fold((0.0f64, f64::INFINITY), |(hi, lo), &s| {
            (hi.max(s), lo.min(s))
        });
    let condition = s_max / s_min;
    let tolerance = s_max * f64::EPSILON * rows.max(cols) as f64;
    if s_min.is_nan() || s_min <= tolerance {
        return Err(Error::RankDeficient {
            condition: if s_min > 0.0 {
                condition
            } else {
                f64::INFINITY
            },
        });
    }

    let qr = scaled.qr();
    let mut rhs = target.clone();
    qr.q_tr_mul(&mut rhs);
    let r = qr.r();
    let solution = r
        .solve_upper_triangular(&rhs.rows(0, cols).into_owned())
        .ok_or(Error::RankDeficient { condition })?;

    let coefficients: Vec<f64> = solution.iter().zip(&scales).map(|(x, s)| x / s).collect();
    let residual_norm = (&design * DVector::from_column_slice(&coefficients) - &target).norm();

    Ok(BetaFit {
        polynomial: BetaPolynomial::new(precision, coefficients)?,
        residual_norm,
        condition_number: condition,
    })
}
