// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use loglog_beta::bench::{emit_report, run_accuracy_sweep, AccuracyReport, BenchSpec};
use loglog_beta::calibration::{
    calibrate, fit_beta, generate_dataset, CalibrationPoint, CalibrationSpec,
};
use loglog_beta::estimators::{loglog_beta_estimate, raw_estimate};
use loglog_beta::mmv::hash_to_unit;
use loglog_beta::{
    BetaPolynomial, EstimatorKind, GridSpec, HashAlgorithm, HllSketch, ItemHasher, MmvSketch,
    Sketch, SketchConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

const P: u8 = 14;
const M: u64 = 1 << P;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn pct(x: f64) -> String {
    format!("{:.3}%", 100.0 * x)
}

fn desk_grid() -> Vec<u64> {
    GridSpec::new(500, 200_000, 5_000).points()
}

/// Worst-case bias and mean absolute error of one estimator across a sweep.
struct Envelope {
    worst_mean: (f64, u64),
    worst_abs: (f64, u64),
}

fn envelope<'a>(rows: impl Iterator<Item = &'a loglog_beta::bench::CardinalityStats>) -> Envelope {
    let mut env = Envelope {
        worst_mean: (0.0, 0),
        worst_abs: (0.0, 0),
    };
    for r in rows {
        if r.mean_rel_err.abs() > env.worst_mean.0.abs() {
            env.worst_mean = (r.mean_rel_err, r.cardinality);
        }
        if r.mean_abs_rel_err > env.worst_abs.0 {
            env.worst_abs = (r.mean_abs_rel_err, r.cardinality);
        }
    }
    env
}

fn near_unbiased(report: &AccuracyReport, kind: EstimatorKind) -> Outcome {
    let points = report.series(kind).count();
    let env = envelope(report.series(kind));
    let pass = points == report.spec.grid.len()
        && env.worst_mean.0.abs() <= 0.010
        && env.worst_abs.0 <= 0.016;
    outcome(
        pass,
        format!(
            "{points} points; worst |mean| {} at {}, worst mean-abs {} at {}",
            pct(env.worst_mean.0.abs()),
            env.worst_mean.1,
            pct(env.worst_abs.0),
            env.worst_abs.1
        ),
    )
}

fn a1() -> Outcome {
    let start = Instant::now();
    let spec = BenchSpec::new(P, vec![EstimatorKind::LogLogBeta], vec![150_000], 200, 0xA1);
    let report = run_accuracy_sweep(&spec).unwrap();
    let elapsed = start.elapsed();
    let sd = report.rows[0].stddev_rel_err;
    outcome(
        (0.006..=0.011).contains(&sd) && elapsed < Duration::from_secs(120),
        format!(
            "stddev {} (theory {}), {:.1?}",
            pct(sd),
            pct(1.04 / (M as f64).sqrt()),
            elapsed
        ),
    )
}

fn a6(sweep: &AccuracyReport) -> Outcome {
    // Bias everywhere, plus mean-abs in the small regime c <= m - 1.
    let env = envelope(sweep.series(EstimatorKind::Mmv));
    let small = BenchSpec::new(P, vec![EstimatorKind::Mmv], vec![M - 1], 100, 0xA6);
    let at_m = run_accuracy_sweep(&small).unwrap();
    let small_rows: Vec<_> = sweep
        .series(EstimatorKind::Mmv)
        .filter(|r| r.cardinality < M)
        .chain(&at_m.rows)
        .collect();
    let worst_small = small_rows
        .iter()
        .map(|r| r.mean_abs_rel_err)
        .fold(0.0, f64::max);
    let (mut worst_bias, mut worst_at) = (env.worst_mean.0.abs(), env.worst_mean.1);
    if at_m.rows[0].mean_rel_err.abs() > worst_bias {
        (worst_bias, worst_at) = (at_m.rows[0].mean_rel_err.abs(), M - 1);
    }
    outcome(
        worst_bias <= 0.010 && worst_small <= 0.020,
        format!(
            "worst |mean| {} at {worst_at}; mean-abs for c <= m-1 at most {} over {} points",
            pct(worst_bias),
            pct(worst_small),
            small_rows.len()
        ),
    )
}

fn a3() -> Outcome {
    let spec = BenchSpec::new(
        P,
        vec![EstimatorKind::Hll, EstimatorKind::LogLogBeta],
        GridSpec::new(10_000, 85_000, 5_000).points(),
        100,
        0xA3,
    );
    let report = run_accuracy_sweep(&spec).unwrap();
    let mut worst = (f64::NEG_INFINITY, 0);
    for &c in &spec.grid {
        let llb = report
            .stats(EstimatorKind::LogLogBeta, c)
            .unwrap()
            .mean_abs_rel_err;
        let hll = report
            .stats(EstimatorKind::Hll, c)
            .unwrap()
            .mean_abs_rel_err;
        if llb - hll > worst.0 {
            worst = (llb - hll, c);
        }
    }
    outcome(
        worst.0 <= 0.001,
        format!(
            "largest llb - hll mean-abs gap {:+.3} pp at {}",
            100.0 * worst.0,
            worst.1
        ),
    )
}

fn a4() -> Outcome {
    let spec = CalibrationSpec {
        precision: P,
        degree: 7,
        grid: GridSpec::new(1_000, 170_000, 2_000).points(),
        trials: 50,
        base_seed: 0xA4_CA11,
        hash: HashAlgorithm::Murmur3,
    };
    let (_, fit) = match calibrate(&spec) {
        Ok(result) => result,
        Err(e) => return outcome(false, format!("calibration failed: {e}")),
    };
    let bench = BenchSpec {
        beta: Some(fit.polynomial.clone()),
        ..BenchSpec::new(P, vec![EstimatorKind::LogLogBeta], desk_grid(), 100, 0xA4)
    };
    let report = run_accuracy_sweep(&bench).unwrap();
    let result = near_unbiased(&report, EstimatorKind::LogLogBeta);
    outcome(
        result.pass,
        format!("refit cond {:.2e}; {}", fit.condition_number, result.detail),
    )
}

fn a5() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(0xA5);
    let mut mismatches = 0;
    for i in 0..1_000 {
        let p = if i % 2 == 0 {
            P
        } else {
            rng.random_range(4..=18)
        };
        let config = SketchConfig::new(p).unwrap();
        let poly = if p == P {
            BetaPolynomial::published_p14()
        } else {
            let k = rng.random_range(1..=7);
            BetaPolynomial::new(p, (0..=k).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
        };
        let registers = (0..config.m())
            .map(|_| rng.random_range(1..=config.max_register()))
            .collect();
        let sketch = HllSketch::from_registers(config, registers).unwrap();
        assert_eq!(sketch.zero_count(), 0);
        let llb = loglog_beta_estimate(&sketch, &poly).unwrap().value;
        if llb.to_bits() != raw_estimate(&sketch).value.to_bits() {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("{mismatches} of 1000 sketches differ"),
    )
}

fn a7() -> Outcome {
    let spec = BenchSpec {
        hash: HashAlgorithm::Sha256,
        ..BenchSpec::new(P, vec![EstimatorKind::LogLogBeta], desk_grid(), 100, 0xA7)
    };
    let report = run_accuracy_sweep(&spec).unwrap();
    let result = near_unbiased(&report, EstimatorKind::LogLogBeta);
    outcome(result.pass, format!("sha256: {}", result.detail))
}

fn naive_beta(coefficients: &[f64], z: f64) -> f64 {
    let z1 = (z + 1.0).ln();
    coefficients[0] * z
        + coefficients[1..]
            .iter()
            .enumerate()
            .map(|(j, c)| c * z1.powi(j as i32 + 1))
            .sum::<f64>()
}

fn a8() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(0xA8);

    // (a) Horner against term-by-term evaluation, relative to the term scale.
    let mut horner_worst: f64 = 0.0;
    for _ in 0..1_000 {
        let p = rng.random_range(4..=18u8);
        let k = rng.random_range(1..=7);
        let coefficients: Vec<f64> = (0..=k).map(|_| rng.random_range(-1.0..1.0)).collect();
        let poly = BetaPolynomial::new(p, coefficients.clone()).unwrap();
        let z = rng.random_range(0..=poly.m());
        let z1 = ((z + 1) as f64).ln();
        let scale = coefficients[0].abs() * z as f64
            + coefficients[1..]
                .iter()
                .enumerate()
                .map(|(j, c)| (c * z1.powi(j as i32 + 1)).abs())
                .sum::<f64>();
        let err = (poly.eval(z) - naive_beta(&coefficients, z as f64)).abs()
            / scale.max(f64::MIN_POSITIVE);
        horner_worst = horner_worst.max(err);
    }
    let a = horner_worst <= 1e-12;

    // (b) Noiseless least-squares recovery of the published polynomial.
    let truth = BetaPolynomial::published_p14();
    let points: Vec<CalibrationPoint> = (0..170)
        .map(|i| {
            let c = 1_000 * (i + 1) as u64;
            let z = M as f64 * (-(c as f64) / M as f64).exp();
            CalibrationPoint {
                cardinality: c,
                mean_zero_count: z,
                mean_beta_hat: naive_beta(truth.coefficients(), z),
                trials: 1,
            }
        })
        .collect();
    let fit = fit_beta(&points, P, 7).unwrap();
    let lsq_worst = fit
        .polynomial
        .coefficients()
        .iter()
        .zip(truth.coefficients())
        .map(|(got, want)| ((got - want) / want).abs())
        .fold(0.0, f64::max);
    let b = lsq_worst <= 1e-8;

    // (c) Split streams merged equal the single stream, both sketch families.
    let mut merge_failures = 0;
    for split in 0..50u64 {
        let p = rng.random_range(4..=16u8);
        let cardinality = rng.random_range(0..20_000u64);
        let hash = HashAlgorithm::Murmur3;
        let mut whole = (HllSketch::new(p).unwrap(), MmvSketch::new(p).unwrap());
        let mut left = whole.clone();
        let mut right = whole.clone();
        for item in generate_dataset(0xC0DE ^ split, cardinality) {
            let h = hash.hash_bytes(&item);
            whole.0.insert_hash(h);
            whole.1.insert_hash(h);
            let side = if rng.random_bool(0.5) {
                &mut left
            } else {
                &mut right
            };
            side.0.insert_hash(h);
            side.1.insert_hash(h);
            // occasional duplicate on the other side
            if rng.random_ratio(1, 10) {
                let other = if rng.random_bool(0.5) {
                    &mut left
                } else {
                    &mut right
                };
                other.0.insert_hash(h);
                other.1.insert_hash(h);
            }
        }
        let hll = left.0.merge(&right.0).unwrap();
        let mmv = left.1.merge(&right.1).unwrap();
        if hll.registers() != whole.0.registers() || mmv.registers() != whole.1.registers() {
            merge_failures += 1;
        }
    }
    let c = merge_failures == 0;

    // (d) p = 4: one hash per bucket; bucket i's suffix has i leading zeros,
    // except bucket 15 whose suffix is all zeros.
    let expected: [u8; 16] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 61];
    let mut small = HllSketch::new(4).unwrap();
    for bucket in 0..16u64 {
        let suffix = if bucket == 15 {
            0
        } else {
            1u64 << (59 - bucket)
        };
        small.insert_hash((bucket << 60) | suffix);
    }
    let d = small.registers() == expected;

    outcome(
        a && b && c && d,
        format!(
            "(a) horner {horner_worst:.1e} (b) lsq {lsq_worst:.1e} (c) {merge_failures}/50 merge mismatches (d) p=4 table {}",
            if d { "ok" } else { "wrong" }
        ),
    )
}

fn a9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let spec = BenchSpec::new(
        12,
        vec![
            EstimatorKind::Hll,
            EstimatorKind::Mmv,
            EstimatorKind::LinearCounting,
        ],
        GridSpec::new(100, 20_100, 2_000).points(),
        20,
        0xA9,
    );
    let first = run_accuracy_sweep(&spec).unwrap();
    let second = run_accuracy_sweep(&spec).unwrap();
    emit_report(&first, &dir.path().join("one")).unwrap();
    emit_report(&second, &dir.path().join("two")).unwrap();
    let mut identical = first == second;
    for name in ["summary.csv", "histograms.csv", "metadata.txt"] {
        let one = std::fs::read(dir.path().join("one").join(name)).unwrap();
        let two = std::fs::read(dir.path().join("two").join(name)).unwrap();
        identical &= one == two;
    }

    let calibration = CalibrationSpec {
        precision: 8,
        degree: 3,
        grid: GridSpec::new(20, 2_000, 40).points(),
        trials: 10,
        base_seed: 0xA9,
        hash: HashAlgorithm::Murmur3,
    };
    let (points_a, fit_a) = calibrate(&calibration).unwrap();
    let (points_b, fit_b) = calibrate(&calibration).unwrap();
    identical &= points_a == points_b && fit_a.polynomial.to_text() == fit_b.polynomial.to_text();

    let mut round_trips = 0;
    let mut seen = HashSet::new();
    for (i, p) in [4u8, 9, 14, 18].into_iter().enumerate() {
        let mut hll = HllSketch::new(p).unwrap();
        let mut mmv = MmvSketch::new(p).unwrap();
        for item in generate_dataset(i as u64, 5_000) {
            let h = HashAlgorithm::Murmur3.hash_bytes(&item);
            hll.insert_hash(h);
            mmv.insert_unit(hash_to_unit(h)).unwrap();
        }
        for sketch in [Sketch::from(hll), Sketch::from(mmv)] {
            let path = dir.path().join(format!("{}-{p}.sk", sketch.kind_name()));
            sketch.save(&path).unwrap();
            let bytes = std::fs::read(&path).unwrap();
            let loaded = Sketch::load(&path).unwrap();
            let again = dir.path().join("again.sk");
            loaded.save(&again).unwrap();
            if loaded == sketch
                && bytes == sketch.encode()
                && std::fs::read(&again).unwrap() == bytes
            {
                round_trips += 1;
            }
            seen.insert(bytes);
        }
    }
    outcome(
        identical && round_trips == 8 && seen.len() == 8,
        format!(
            "reports {}; {round_trips}/8 sketch files byte-exact",
            if identical { "bit-identical" } else { "differ" }
        ),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: &str, name: &str, elapsed: Duration, o: Outcome| {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{id} {verdict} {name}: {} [{elapsed:.1?}]", o.detail);
        if !o.pass {
            failed += 1;
        }
    };
    let timed = |f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        (t.elapsed(), o)
    };

    let (d, o) = timed(&a1);
    report("A1", "asymptotic standard error", d, o);

    // A2 and A6 share one paired sweep.
    let t = Instant::now();
    let sweep = run_accuracy_sweep(&BenchSpec::new(
        P,
        vec![EstimatorKind::LogLogBeta, EstimatorKind::Mmv],
        desk_grid(),
        100,
        0xA2,
    ))
    .unwrap();
    let sweep_time = t.elapsed();
    report(
        "A2",
        "near-unbiased over 500..200000",
        sweep_time,
        near_unbiased(&sweep, EstimatorKind::LogLogBeta),
    );

    let (d, o) = timed(&a3);
    report("A3", "mid-range llb vs hll", d, o);
    let (d, o) = timed(&a4);
    report("A4", "calibration round trip", d, o);
    let (d, o) = timed(&a5);
    report("A5", "z = 0 equivalence", d, o);
    let (d, o) = timed(&|| a6(&sweep));
    report("A6", "mmv accuracy", sweep_time + d, o);
    let (d, o) = timed(&a7);
    report("A7", "hash independence", d, o);
    let (d, o) = timed(&a8);
    report("A8", "oracle equivalences", d, o);
    let (d, o) = timed(&a9);
    report("A9", "determinism and serialization", d, o);

    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
