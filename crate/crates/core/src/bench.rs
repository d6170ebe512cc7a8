//! Iteration and wall-time measurements across prime gaps.
//!
//! Records stream out as JSON Lines; [`scaling_summary`] folds them into a
//! per-gap table next to the analytic Fermat cost `gap² / (8·√n)`, which is
//! the leading term of `(p + q)/2 − √(pq)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::engine::{
    fermat_factor, xscan_factor, Budget, Method, OutcomeKind,
};
use crate::error::{Error, Result};
use crate::lab::{gap_ladder, GeneratedSemiprime};
use crate::numeric::ceil_sqrt;
use crate::serde_num;

/// One timed factorization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub n_bits: u64,
    #[serde(with = "serde_num::decimal")]
    pub n: BigUint,
    /// `q − p`, when the factors are known in advance.
    #[serde(with = "serde_num::opt_decimal")]
    pub gap: Option<BigUint>,
    pub method: Method,
    #[serde(with = "serde_num::count")]
    pub iterations: u64,
    #[serde(with = "serde_num::count")]
    pub elapsed_ns: u64,
    pub outcome: OutcomeKind,
    #[serde(with = "serde_num::count")]
    pub seed: u64,
    /// `(p + q)/2 − ⌈√n⌉`, when the factors are known in advance.
    #[serde(with = "serde_num::opt_wide_count")]
    pub predicted_iterations: Option<BigUint>,
}

impl BenchRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }
}

/// A modulus to measure, with its factors if they are known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchCase {
    pub n: BigUint,
    pub factors: Option<(BigUint, BigUint)>,
    pub seed: u64,
}

impl From<&GeneratedSemiprime> for BenchCase {
    fn from(g: &GeneratedSemiprime) -> Self {
        BenchCase {
            n: g.n.clone(),
            factors: Some((g.p.clone(), g.q.clone())),
            seed: g.seed,
        }
    }
}

/// Fermat iteration count implied by the factors: `(p + q)/2 − ⌈√n⌉`.
pub fn predicted_iterations(p: &BigUint, q: &BigUint) -> BigUint {
    let n = p * q;
    ((p + q) >> 1u32) - ceil_sqrt(&n)
}

/// Times one factorization of `case` with `method`.
pub fn measure(case: &BenchCase, method: Method, budget: &Budget) -> Result<BenchRecord> {
    let started = Instant::now();
    let (iterations, outcome) = match method {
        Method::Fermat => {
            let out = fermat_factor(&case.n, budget)?;
            (out.iterations(), out.kind())
        }
        Method::Xscan => {
            let out = xscan_factor(&case.n, budget)?;
            (out.iterations(), out.kind())
        }
    };
    let elapsed_ns = u64::try_from(started.elapsed().as_nanos())
        .unwrap_or(u64::MAX)
        .max(1);
    let (gap, predicted) = match &case.factors {
        Some((p, q)) => {
            let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
            (Some(hi - lo), Some(predicted_iterations(lo, hi)))
        }
        None => (None, None),
    };
    Ok(BenchRecord {
        n_bits: case.n.bits(),
        n: case.n.clone(),
        gap,
        method,
        iterations,
        elapsed_ns,
        outcome,
        seed: case.seed,
        predicted_iterations: predicted,
    })
}

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub bits: u32,
    /// Strictly ascending gap bounds, one semiprime per bound and sample.
    pub gaps: Vec<BigUint>,
    pub seed: u64,
    pub budget: Budget,
    pub methods: BTreeSet<Method>,
    /// Gap ladders to draw. Sample `s` uses base seed `seed + s·gaps.len()`.
    pub samples: u32,
}

/// A ladder entry that could not be generated.
#[derive(Debug)]
pub struct StudyFailure {
    pub gap_bound: BigUint,
    pub seed: u64,
    pub error: Error,
}

#[derive(Debug, Default)]
pub struct StudyReport {
    pub records: Vec<BenchRecord>,
    pub failures: Vec<StudyFailure>,
}

/// Generates the gap ladder(s) and measures each semiprime with every method,
/// handing each record to `sink` as soon as it is measured. Generation
/// failures are collected in the report rather than aborting the study.
pub fn run_study(
    config: &StudyConfig,
    mut sink: impl FnMut(&BenchRecord) -> Result<()>,
) -> Result<StudyReport> {
    if config.methods.is_empty() {
        return Err(Error::InvalidSpec("at least one method is required".into()));
    }
    let mut report = StudyReport::default();
    for sample in 0..config.samples.max(1) {
        let base = config
            .seed
            .wrapping_add(u64::from(sample) * config.gaps.len() as u64);
        let ladder = gap_ladder(config.bits, &config.gaps, base)?;
        for (i, entry) in ladder.into_iter().enumerate() {
            let semiprime = match entry {
                Ok(g) => g,
                Err(error) => {
                    report.failures.push(StudyFailure {
                        gap_bound: config.gaps[i].clone(),
                        seed: base.wrapping_add(i as u64),
                        error,
                    });
                    continue;
                }
            };
            let case = BenchCase::from(&semiprime);
            for &method in &config.methods {
                let record = measure(&case, method, &config.budget)?;
                sink(&record)?;
                report.records.push(record);
            }
        }
    }
    Ok(report)
}

/// Writes one JSON line and flushes, so a partial file is always valid.
pub fn write_record<W: Write>(out: &mut W, record: &BenchRecord) -> Result<()> {
    writeln!(out, "{}", record.to_json_line())?;
    out.flush()?;
    Ok(())
}

pub fn read_records(jsonl: &str) -> Result<Vec<BenchRecord>> {
    jsonl
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

/// Analytic Fermat iteration estimate `gap² / (8·√n)`.
pub fn analytic_iterations(gap: &BigUint, n: &BigUint) -> f64 {
    let gap = gap.to_f64().unwrap_or(f64::INFINITY);
    let n = n.to_f64().unwrap_or(f64::INFINITY);
    gap * gap / (8.0 * n.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub gap: BigUint,
    pub n_bits: u64,
    pub runs: usize,
    pub median_iterations: f64,
    pub analytic_iterations: f64,
    /// `median_iterations / analytic_iterations`; NaN when the estimate is 0.
    pub ratio: f64,
    pub median_elapsed_ns: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSummary {
    pub rows: Vec<SummaryRow>,
}

pub const CSV_HEADER: &str =
    "gap,n_bits,runs,median_iterations,analytic_iterations,ratio,median_elapsed_ns";

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

/// Per-(gap, bit size) medians of the found Fermat records, set against the
/// analytic estimate. Other methods and outcomes are left out because the
/// estimate models the Fermat walk's iteration count.
pub fn scaling_summary(records: &[BenchRecord]) -> Result<ScalingSummary> {
    if records.is_empty() {
        return Err(Error::Summary("no records".into()));
    }
    if records
        .iter()
        .all(|r| r.outcome == OutcomeKind::BudgetExhausted)
    {
        return Err(Error::Summary(format!(
            "all {} records exhausted their budget; none found a factor",
            records.len()
        )));
    }
    let mut groups: BTreeMap<(BigUint, u64), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        if r.method != Method::Fermat || r.outcome != OutcomeKind::Found {
            continue;
        }
        if let Some(gap) = &r.gap {
            groups.entry((gap.clone(), r.n_bits)).or_default().push(r);
        }
    }
    if groups.is_empty() {
        return Err(Error::Summary(
            "no fermat record with a known gap found a factor".into(),
        ));
    }
    let distinct_gaps: BTreeSet<&BigUint> = groups.keys().map(|(g, _)| g).collect();
    if distinct_gaps.len() < 2 {
        return Err(Error::Summary(format!(
            "need found records at two or more distinct gaps, got {}",
            distinct_gaps.len()
        )));
    }
    let rows = groups
        .into_iter()
        .map(|((gap, n_bits), rs)| {
            let mut iterations: Vec<f64> = rs.iter().map(|r| r.iterations as f64).collect();
            let mut elapsed: Vec<f64> = rs.iter().map(|r| r.elapsed_ns as f64).collect();
            let mut analytic: Vec<f64> = rs.iter().map(|r| analytic_iterations(&gap, &r.n)).collect();
            let median_iterations = median(&mut iterations);
            let analytic_iterations = median(&mut analytic);
            let ratio = if analytic_iterations > 0.0 {
                median_iterations / analytic_iterations
            } else {
                f64::NAN
            };
            SummaryRow {
                gap,
                n_bits,
                runs: rs.len(),
                median_iterations,
                analytic_iterations,
                ratio,
                median_elapsed_ns: median(&mut elapsed),
            }
        })
        .collect();
    Ok(ScalingSummary { rows })
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_owned()
    } else if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v:.6}")
    }
}

impl ScalingSummary {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.gap,
                r.n_bits,
                r.runs,
                num(r.median_iterations),
                num(r.analytic_iterations),
                num(r.ratio),
                num(r.median_elapsed_ns)
            );
        }
        out
    }
}

impl fmt::Display for ScalingSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header: Vec<&str> = CSV_HEADER.split(',').collect();
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.gap.to_string(),
                    r.n_bits.to_string(),
                    r.runs.to_string(),
                    num(r.median_iterations),
                    num(r.analytic_iterations),
                    num(r.ratio),
                    num(r.median_elapsed_ns),
                ]
            })
            .collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|c| {
                cells
                    .iter()
                    .map(|row| row[c].len())
                    .chain([header[c].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |f: &mut fmt::Formatter<'_>, row: &[&str]| -> fmt::Result {
            let padded: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:>w$}"))
                .collect();
            writeln!(f, "{}", padded.join("  "))
        };
        line(f, &header)?;
        for row in &cells {
            line(f, &row.iter().map(String::as_str).collect::<Vec<_>>())?;
        }
        Ok(())
    }
}

/// A modulus stored on disk as `key = value` lines (`n`, optionally `p` and
/// `q`); `#` starts a comment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub n: BigUint,
    pub factors: Option<(BigUint, BigUint)>,
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidSpec(format!("fixture: {msg}"));
        let mut values: BTreeMap<&str, BigUint> = BTreeMap::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if !matches!(key, "n" | "p" | "q") {
                return Err(bad(format!("unknown key {key:?}")));
            }
            let parsed = value
                .parse::<crate::numeric::Modulus>()
                .map_err(|e| bad(e.to_string()))?
                .value;
            if values.insert(key, parsed).is_some() {
                return Err(bad(format!("duplicate key {key:?}")));
            }
        }
        let n = values.remove("n").ok_or_else(|| bad("missing n".into()))?;
        let factors = match (values.remove("p"), values.remove("q")) {
            (Some(p), Some(q)) => {
                if &p * &q != n {
                    return Err(bad("p * q does not equal n".into()));
                }
                Some((p, q))
            }
            (None, None) => None,
            _ => return Err(bad("p and q must be given together".into())),
        };
        Ok(Fixture { n, factors })
    }
}

impl Fixture {
    pub fn into_case(self, seed: u64) -> BenchCase {
        BenchCase {
            n: self.n,
            factors: self.factors,
            seed,
        }
    }
}
