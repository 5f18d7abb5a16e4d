use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use clap::ValueEnum;
use rootwave::constants::{self, ConstantError, EulerProduct, MAX_DELTA_MAX, MAX_PMAX};
use rootwave::expsums::{
    self, ExpSumError, SumSeries, SweepReport, LEMMA1_CALIBRATION, LEMMA1_GRID_QMAX,
};
use rootwave::roots::{FactoredPoly, RootsError};
use rootwave::{charsums, gauss, vdc};
use serde::Serialize;

use crate::grammar::parse_poly;
use crate::record::{series_csv, RunRecord, SCHEMA_VERSION};
use crate::{CliError, ConstantArgs, Suite, SumArgs, VerifyArgs, Which, THREADS_ENV};

pub const WEIL_SEED: u64 = 42;
pub const K1K2_SEED: u64 = 1;
/// Regression tolerance on committed calibration maxima.
pub const CALIBRATION_SLACK: f64 = 1.05;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// `flag`, else `ROOTWAVE_THREADS`, else `default`.
pub fn resolve_threads(flag: Option<usize>, default: usize) -> Result<usize, CliError> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{THREADS_ENV}={v} is not a thread count"))),
        Err(_) => Ok(default),
    }
}

fn with_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| usage(format!("thread pool: {e}")))?;
    Ok(pool.install(job))
}

fn sum_error(e: ExpSumError) -> CliError {
    match e {
        ExpSumError::Scale(_)
        | ExpSumError::RangeTooLong
        | ExpSumError::Roots(RootsError::Overflow(_) | RootsError::Scale(_)) => {
            CliError::Scale(e.to_string())
        }
        ExpSumError::BadResume(_) => CliError::Resume(e.to_string()),
        _ => usage(e.to_string()),
    }
}

fn constant_error(e: ConstantError) -> CliError {
    match e {
        ConstantError::BadPmax(p) if p > MAX_PMAX => CliError::Scale(e.to_string()),
        ConstantError::BadDeltaMax(d) if d > MAX_DELTA_MAX => CliError::Scale(e.to_string()),
        _ => usage(e.to_string()),
    }
}

/// `"decades"` gives `10, 100, …` up to `x`; otherwise a comma list.
pub fn parse_checkpoints(spec: Option<&str>, x: u64) -> Result<Vec<u64>, CliError> {
    let Some(spec) = spec.map(str::trim) else {
        return Ok(vec![]);
    };
    if spec == "decades" {
        return Ok(std::iter::successors(Some(10u64), |d| d.checked_mul(10))
            .take_while(|&d| d <= x)
            .collect());
    }
    let mut out = Vec::new();
    for part in spec.split(',') {
        let c: u64 = part
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad checkpoint '{part}'")))?;
        if c == 0 || c > x {
            return Err(usage(format!("checkpoint {c} outside [1, {x}]")));
        }
        out.push(c);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

enum OutFormat {
    Csv,
    Json,
}

fn out_format(path: &Path) -> Result<OutFormat, CliError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok(OutFormat::Csv),
        Some("json") => Ok(OutFormat::Json),
        _ => Err(usage(format!(
            "{}: output must end in .csv or .json",
            path.display()
        ))),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| usage(format!("stdout: {e}")))
}

/// The polynomial and frequency of a resumed run, checked against any
/// values given again on the command line.
fn resumed_parameters(rec: &RunRecord, args: &SumArgs) -> Result<(FactoredPoly, i64), CliError> {
    let mismatch = |what: &str| CliError::Resume(format!("resume record {what}"));
    if rec.command != "sum" {
        return Err(mismatch("is not from a sum run"));
    }
    let poly = rec
        .parameters
        .get("poly")
        .ok_or_else(|| mismatch("has no poly"))?;
    let f = parse_poly(poly).map_err(|e| mismatch(&format!("has an invalid poly: {e}")))?;
    let h: i64 = rec
        .parameters
        .get("h")
        .and_then(|h| h.parse().ok())
        .ok_or_else(|| mismatch("has no valid h"))?;
    if let Some(given) = &args.poly {
        let given = parse_poly(given).map_err(|e| usage(format!("--poly: {e}")))?;
        if given != f {
            return Err(mismatch(&format!("is for poly {f}, not {given}")));
        }
    }
    if args.h.is_some_and(|g| g != h) {
        return Err(mismatch(&format!("is for h = {h}")));
    }
    Ok((f, h))
}

pub fn cmd_sum(args: &SumArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if args.x == 0 {
        return Err(usage("--x must be at least 1"));
    }
    let threads = resolve_threads(args.threads, 0)?;
    let format = args.out.as_deref().map(out_format).transpose()?;
    let prior = args
        .resume
        .as_deref()
        .map(|p| RunRecord::load(p).map_err(CliError::Resume))
        .transpose()?;
    let (f, h) = match &prior {
        Some(rec) => resumed_parameters(rec, args)?,
        None => {
            let src = args
                .poly
                .as_deref()
                .ok_or_else(|| usage("--poly is required"))?;
            (
                parse_poly(src).map_err(|e| usage(format!("--poly: {e}")))?,
                args.h.unwrap_or(1),
            )
        }
    };
    if h == 0 {
        return Err(usage("--h must be nonzero"));
    }
    let checkpoints = parse_checkpoints(args.checkpoints.as_deref(), args.x)?;
    let start = Instant::now();
    let series = match &prior {
        Some(rec) => {
            expsums::s_sieve_resume(&f, h, &rec.checkpoints, args.x, &checkpoints, threads)
        }
        None => expsums::s_sieve(&f, args.x, h, &checkpoints, threads),
    }
    .map_err(sum_error)?;
    let wall_time = start.elapsed().as_secs_f64();
    match (format, &args.out) {
        (Some(OutFormat::Json), Some(path)) => {
            let record = sum_record(&f, h, args, series, wall_time, threads);
            write_file(path, &record.to_json())?;
        }
        (Some(OutFormat::Csv), Some(path)) => write_file(path, &series_csv(&series))?,
        _ => emit(out, &series_csv(&series))?,
    }
    Ok(0)
}

fn sum_record(
    f: &FactoredPoly,
    h: i64,
    args: &SumArgs,
    series: SumSeries,
    wall_time: f64,
    threads: usize,
) -> RunRecord {
    let mut parameters = BTreeMap::new();
    parameters.insert("poly".to_string(), f.to_string());
    parameters.insert("h".to_string(), h.to_string());
    parameters.insert("x".to_string(), args.x.to_string());
    if let Some(c) = &args.checkpoints {
        parameters.insert("checkpoints".to_string(), c.clone());
    }
    if let Some(r) = &args.resume {
        parameters.insert("resumed_from".to_string(), r.display().to_string());
    }
    RunRecord {
        schema_version: SCHEMA_VERSION,
        command: "sum".to_string(),
        parameters,
        checkpoints: series,
        wall_time,
        thread_count: if threads == 0 {
            rayon::current_num_threads()
        } else {
            threads
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantOutput {
    pub value: f64,
    pub pmax: Option<u64>,
    pub tail: f64,
}

impl From<EulerProduct> for ConstantOutput {
    fn from(e: EulerProduct) -> Self {
        ConstantOutput {
            value: e.value,
            pmax: Some(e.pmax),
            tail: e.tail_bound,
        }
    }
}

pub fn evaluate_constant(args: &ConstantArgs) -> Result<ConstantOutput, CliError> {
    let which = args
        .which
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    let need = |v: Option<i64>, name: &str| {
        v.ok_or_else(|| usage(format!("--which {which} needs --{name}")))
    };
    match args.which {
        Which::Quadratic => {
            let (a, c) = (need(args.a, "a")?, need(args.c, "c")?);
            let value = constants::c_f1_quadratic(a, c).map_err(constant_error)?;
            Ok(ConstantOutput {
                value,
                pmax: None,
                tail: 0.0,
            })
        }
        Which::General => {
            let (a, b, c, d) = (
                need(args.a, "a")?,
                need(args.b, "b")?,
                need(args.c, "c")?,
                need(args.d, "d")?,
            );
            let f = FactoredPoly::linear(&[(a, b), (c, d)]).map_err(|e| usage(e.to_string()))?;
            let h = args.h.unwrap_or(1);
            Ok(constants::c_general(&f, h, args.deltamax, args.pmax)
                .map_err(constant_error)?
                .into())
        }
        Which::Thm2 => Ok(constants::theorem2_constant(args.pmax)
            .map_err(constant_error)?
            .into()),
        Which::Thm3 => Ok(constants::theorem3_constant(args.pmax)
            .map_err(constant_error)?
            .into()),
    }
}

pub fn cmd_constant(args: &ConstantArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let threads = resolve_threads(args.threads, 1)?;
    let value = with_pool(threads, || evaluate_constant(args))??;
    let text = serde_json::to_string(&value).expect("constants serialize") + "\n";
    if let Some(path) = &args.out {
        write_file(path, &text)?;
    }
    emit(out, &text)?;
    Ok(0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub seed: Option<u64>,
    pub budget: u64,
    /// Ratio above which a case counts as a violation, when ratio-based.
    pub limit: Option<f64>,
    #[serde(flatten)]
    pub report: SweepReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub suites: Vec<SuiteResult>,
    pub violations: u64,
}

fn budget_in(budget: Option<u64>, default: u64, max: u64, name: &str) -> Result<u64, CliError> {
    let b = budget.unwrap_or(default);
    if b == 0 {
        return Err(usage(format!("--budget for {name} must be positive")));
    }
    if b > max {
        return Err(CliError::Scale(format!(
            "--budget {b} for {name} exceeds {max}"
        )));
    }
    Ok(b)
}

/// Runs one suite (two reports for `weil`: random rational functions and
/// prime-modulus Kloosterman sums).
pub fn run_suite(
    suite: Suite,
    seed: Option<u64>,
    budget: Option<u64>,
) -> Result<Vec<SuiteResult>, CliError> {
    let err = |e: &dyn std::fmt::Display| usage(e.to_string());
    let result = |suite, seed, budget, limit, report| SuiteResult {
        suite,
        seed,
        budget,
        limit,
        report,
    };
    Ok(match suite {
        Suite::Lemma1 => {
            let q = budget_in(budget, LEMMA1_GRID_QMAX, 20_000, "lemma1")?;
            let limit = CALIBRATION_SLACK * LEMMA1_CALIBRATION;
            vec![result(
                "lemma1",
                None,
                q,
                Some(limit),
                expsums::lemma1_sweep(q, limit),
            )]
        }
        Suite::Gauss => {
            let l = budget_in(budget, 100_000, 10_000_000, "gauss")?;
            vec![result(
                "gauss",
                None,
                l,
                None,
                gauss::gauss_sweep(l).map_err(|e| err(&e))?,
            )]
        }
        Suite::K1k2 => {
            let n = budget_in(budget, 10_000, 10_000_000, "k1k2")?;
            let seed = seed.unwrap_or(K1K2_SEED);
            vec![result(
                "k1k2",
                Some(seed),
                n,
                None,
                gauss::k1k2_sweep(seed, n, 100_000).map_err(|e| err(&e))?,
            )]
        }
        Suite::Weil => {
            let n = budget_in(budget, 1000, 1_000_000, "weil")?;
            let seed = seed.unwrap_or(WEIL_SEED);
            let weil = charsums::weil_sweep(seed, n, 997, 4).map_err(|e| err(&e))?;
            let kloosterman = charsums::kloosterman_prime_sweep(997).map_err(|e| err(&e))?;
            vec![
                result("weil", Some(seed), n, Some(1.0), weil),
                result("kloosterman", None, 997, Some(1.0), kloosterman),
            ]
        }
        Suite::Aprocess => {
            let n = budget_in(budget, vdc::A_PROCESS_TRIALS as u64, 1_000_000, "aprocess")?;
            let seed = seed.unwrap_or(vdc::A_PROCESS_SEED);
            let limit = CALIBRATION_SLACK * vdc::A_PROCESS_CALIBRATION;
            vec![result(
                "aprocess",
                Some(seed),
                n,
                Some(limit),
                vdc::a_process_sweep(seed, n as usize, limit),
            )]
        }
        Suite::Parity => {
            let p = budget_in(budget, 13, 31, "parity")?;
            vec![result(
                "parity",
                None,
                p,
                None,
                vdc::subset_parity_sweep(p, 4).map_err(|e| err(&e))?,
            )]
        }
        Suite::All => {
            if budget.is_some() {
                return Err(usage("--budget applies to a single suite"));
            }
            let mut all = Vec::new();
            for s in [
                Suite::Lemma1,
                Suite::Gauss,
                Suite::K1k2,
                Suite::Weil,
                Suite::Aprocess,
                Suite::Parity,
            ] {
                all.extend(run_suite(s, seed, None)?);
            }
            all
        }
    })
}

pub fn cmd_verify(
    args: &VerifyArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let threads = resolve_threads(args.threads, 1)?;
    if let Some(path) = &args.out {
        if !matches!(out_format(path)?, OutFormat::Json) {
            return Err(usage("verify reports are JSON"));
        }
    }
    let suites = with_pool(threads, || run_suite(args.suite, args.seed, args.budget))??;
    let violations = suites.iter().map(|s| s.report.violations).sum();
    let report = VerifyReport {
        schema_version: SCHEMA_VERSION,
        suites,
        violations,
    };
    let text = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
    if let Some(path) = &args.out {
        write_file(path, &text)?;
    }
    emit(out, &text)?;
    for s in report.suites.iter().filter(|s| s.report.violations > 0) {
        let _ = writeln!(
            err,
            "{}: {} violation(s), first at {}",
            s.suite,
            s.report.violations,
            s.report.witness.as_deref().unwrap_or("?")
        );
    }
    Ok(if violations > 0 { 1 } else { 0 })
}
