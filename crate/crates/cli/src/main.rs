// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

//! `llb`: estimate, persist, merge and inspect sketches; calibrate `beta`
//! coefficients; run accuracy sweeps.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or format error.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use loglog_beta::bench::{emit_report, run_accuracy_sweep, BenchSpec, DEFAULT_BINS};
use loglog_beta::calibration::{
    calibrate, calibration_report, derive_bias_table, BiasTable, CalibrationSpec,
};
use loglog_beta::estimators::estimate_sketch;
use loglog_beta::{
    BetaPolynomial, EstimatorKind, EstimatorResources, GridSpec, HashAlgorithm, HllSketch,
    ItemHasher, MmvSketch, Sketch, SketchConfig,
};

const USAGE_EXIT: u8 = 1;
const DATA_EXIT: u8 = 2;

#[derive(Parser)]
#[command(name = "llb", version, about = "LogLog-beta cardinality estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the number of distinct newline-delimited items.
    Estimate(EstimateArgs),
    /// Build a sketch from newline-delimited items and save it.
    Sketch(SketchArgs),
    /// Union sketch files of the same kind and precision.
    Merge(MergeArgs),
    /// Print sketch metadata and an estimate.
    Inspect(InspectArgs),
    /// Fit beta coefficients from seeded simulations.
    Calibrate(CalibrateArgs),
    /// Run an accuracy sweep and write CSV reports.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ResourceArgs {
    /// Coefficient file for llb (p = 14 uses the embedded set by default).
    #[arg(long)]
    coefficients: Option<PathBuf>,
    /// Bias table file for hllpp.
    #[arg(long)]
    bias_table: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long, default_value_t = 14)]
    p: u8,
    #[arg(long, default_value = "llb")]
    estimator: EstimatorKind,
    #[command(flatten)]
    resources: ResourceArgs,
    #[arg(long, default_value = "murmur3")]
    hash: HashAlgorithm,
    /// Read items from a file instead of standard input.
    #[arg(long = "in")]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct SketchArgs {
    #[arg(long, default_value_t = 14)]
    p: u8,
    /// Sketch family: hll or mmv.
    #[arg(long, default_value = "hll", value_parser = ["hll", "mmv"])]
    kind: String,
    #[arg(long, default_value = "murmur3")]
    hash: HashAlgorithm,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output sketch file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MergeArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct InspectArgs {
    /// Defaults to llb for p = 14 HLL sketches, hll for other HLL sketches
    /// and mmv for MMV sketches.
    #[arg(long)]
    estimator: Option<EstimatorKind>,
    #[command(flatten)]
    resources: ResourceArgs,
    file: PathBuf,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long, default_value_t = 14)]
    p: u8,
    /// Polynomial degree.
    #[arg(long, default_value_t = 7)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    trials: Option<u32>,
    /// Cardinality grid `start:stop:step`; defaults to the standard grid for `p`.
    #[arg(long)]
    grid: Option<GridSpec>,
    #[arg(long, default_value = "murmur3")]
    hash: HashAlgorithm,
    /// Also derive a bias table for hllpp.
    #[arg(long)]
    bias_table: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 14)]
    p: u8,
    /// Comma-separated estimators.
    #[arg(long, value_delimiter = ',', default_value = "hll,llb,mmv")]
    estimator: Vec<EstimatorKind>,
    #[command(flatten)]
    resources: ResourceArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    trials: Option<u32>,
    #[arg(long)]
    grid: Option<GridSpec>,
    #[arg(long, default_value = "murmur3")]
    hash: HashAlgorithm,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    /// 500 trials at step 500; slow.
    #[arg(long)]
    full_scale: bool,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(USAGE_EXIT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Sketch(a) => cmd_sketch(a),
        Command::Merge(a) => cmd_merge(a),
        Command::Inspect(a) => cmd_inspect(a),
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(DATA_EXIT)
        }
    }
}

type CliResult<T = ()> = Result<T, String>;

fn fail(e: impl ToString) -> String {
    e.to_string()
}

fn open_input(path: Option<&Path>) -> CliResult<Box<dyn BufRead>> {
    Ok(match path {
        Some(p) => {
            let file = File::open(p).map_err(|e| format!("{}: {e}", p.display()))?;
            Box::new(BufReader::new(file))
        }
        None => Box::new(BufReader::new(io::stdin())),
    })
}

/// Feeds every newline-delimited item, unmodified, to `sketch`.
fn sketch_items(sketch: &mut Sketch, hash: HashAlgorithm, input: Option<&Path>) -> CliResult {
    for line in open_input(input)?.split(b'\n') {
        let item = line.map_err(fail)?;
        sketch.insert_hash(hash.hash_bytes(&item));
    }
    Ok(())
}

fn empty_sketch(kind_is_mmv: bool, p: u8) -> CliResult<Sketch> {
    Ok(if kind_is_mmv {
        MmvSketch::new(p).map_err(fail)?.into()
    } else {
        HllSketch::new(p).map_err(fail)?.into()
    })
}

fn load_resources(args: &ResourceArgs, p: u8) -> CliResult<EstimatorResources> {
    let beta = match &args.coefficients {
        Some(path) => Some(BetaPolynomial::load(path).map_err(fail)?),
        None => BetaPolynomial::embedded(p),
    };
    let bias_table = match &args.bias_table {
        Some(path) => Some(BiasTable::load(path).map_err(fail)?),
        None => None,
    };
    Ok(EstimatorResources { beta, bias_table })
}

fn cmd_estimate(a: EstimateArgs) -> CliResult {
    SketchConfig::new(a.p).map_err(fail)?;
    let resources = load_resources(&a.resources, a.p)?;
    resources.check(a.estimator, a.p).map_err(fail)?;
    let mut sketch = empty_sketch(a.estimator.uses_mmv_sketch(), a.p)?;
    sketch_items(&mut sketch, a.hash, a.input.as_deref())?;
    let estimate = estimate_sketch(&sketch, a.estimator, &resources).map_err(fail)?;
    println!("{}\t{}", estimate.estimator, estimate.value);
    Ok(())
}

fn cmd_sketch(a: SketchArgs) -> CliResult {
    let mut sketch = empty_sketch(a.kind == "mmv", a.p)?;
    sketch_items(&mut sketch, a.hash, a.input.as_deref())?;
    sketch.save(&a.out).map_err(fail)
}

fn cmd_merge(a: MergeArgs) -> CliResult {
    let mut inputs = a.inputs.iter();
    let mut merged = Sketch::load(inputs.next().unwrap()).map_err(fail)?;
    for path in inputs {
        let other = Sketch::load(path).map_err(fail)?;
        merged
            .merge_from(&other)
            .map_err(|e| format!("{}: {e}", path.display()))?;
    }
    merged.save(&a.out).map_err(fail)
}

fn cmd_inspect(a: InspectArgs) -> CliResult {
    let sketch = Sketch::load(&a.file).map_err(fail)?;
    let p = sketch.config().precision();
    let (z, denominator) = match &sketch {
        Sketch::Hll(s) => (s.zero_count(), s.harmonic_denominator()),
        Sketch::Mmv(s) => (s.untouched_count(), s.register_sum()),
    };
    let resources = load_resources(&a.resources, p)?;
    let estimator = a.estimator.unwrap_or(match &sketch {
        Sketch::Mmv(_) => EstimatorKind::Mmv,
        Sketch::Hll(_) if resources.beta.is_some() => EstimatorKind::LogLogBeta,
        Sketch::Hll(_) => EstimatorKind::Hll,
    });
    let estimate = estimate_sketch(&sketch, estimator, &resources).map_err(fail)?;

    let mut out = io::stdout().lock();
    let mut emit = || -> io::Result<()> {
        writeln!(out, "kind: {}", sketch.kind_name())?;
        writeln!(out, "p: {p}")?;
        writeln!(out, "m: {}", sketch.config().m())?;
        writeln!(out, "z: {z}")?;
        writeln!(out, "denominator: {denominator}")?;
        writeln!(out, "estimate: {}\t{}", estimate.estimator, estimate.value)
    };
    emit().map_err(fail)
}

fn create_dir(dir: &Path) -> CliResult {
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))
}

fn cmd_calibrate(a: CalibrateArgs) -> CliResult {
    let mut spec = CalibrationSpec::standard(a.p, a.seed).map_err(fail)?;
    spec.degree = a.k;
    spec.hash = a.hash;
    if let Some(trials) = a.trials {
        spec.trials = trials;
    }
    if let Some(grid) = a.grid {
        spec.grid = grid.points();
    }
    let (points, fit) = calibrate(&spec).map_err(fail)?;
    create_dir(&a.out)?;
    fit.polynomial
        .save(&a.out.join("coefficients.txt"))
        .map_err(fail)?;
    let report_path = a.out.join("calibration_report.txt");
    std::fs::write(&report_path, calibration_report(&spec, &points, &fit))
        .map_err(|e| format!("{}: {e}", report_path.display()))?;
    if a.bias_table {
        let mut bias_spec = CalibrationSpec::bias_table(a.p, a.seed).map_err(fail)?;
        bias_spec.hash = a.hash;
        derive_bias_table(&bias_spec)
            .map_err(fail)?
            .save(&a.out.join("bias_table.txt"))
            .map_err(fail)?;
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> CliResult {
    let mut spec = if a.full_scale {
        eprintln!("warning: full-scale sweep (500 trials, step 500) can take hours");
        BenchSpec::full_scale(a.p, a.estimator.clone(), a.seed)
    } else {
        BenchSpec::desk_scale(a.p, a.estimator.clone(), a.seed)
    };
    let resources = load_resources(&a.resources, a.p)?;
    spec.beta = resources.beta;
    spec.bias_table = resources.bias_table;
    spec.hash = a.hash;
    spec.bins = a.bins;
    if let Some(trials) = a.trials {
        spec.trials = trials;
    }
    if let Some(grid) = a.grid {
        spec.grid = grid.points();
    }
    if spec.bias_table.is_none() && spec.estimators.contains(&EstimatorKind::HllPlusPlus) {
        eprintln!("note: no --bias-table given; deriving one for hllpp");
        let mut bias_spec = CalibrationSpec::bias_table(a.p, a.seed).map_err(fail)?;
        bias_spec.hash = a.hash;
        // Keep the table's datasets disjoint from the sweep's.
        bias_spec.base_seed = a.seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
        spec.bias_table = Some(derive_bias_table(&bias_spec).map_err(fail)?);
    }
    let report = run_accuracy_sweep(&spec).map_err(fail)?;
    for (kind, reason) in &report.unavailable {
        eprintln!("warning: {kind} skipped: {reason}");
    }
    emit_report(&report, &a.out).map_err(fail)
}
