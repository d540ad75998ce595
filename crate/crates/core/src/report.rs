//! Experiment harness behind the CLI: parameter scans, formula-vs-oracle
//! comparison reports, the bound suite, and CSV/JSON emission.
//!
//! Every run with a fixed seed and fixed configuration produces byte-identical
//! output: grid cells are evaluated (possibly in parallel) but always emitted
//! in canonical grid order, reals are printed with 12 significant digits, and
//! rationals as `num/den`.

use std::io::Write;
use std::path::PathBuf;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::families::{
    all_permutations, identity, parse_permutation, random_uniform, reversed, shifted, shifted_k,
};
use crate::formulas::{
    beta_integral_check, binom_tail_check, extremal_scale, log_chain_check,
    marked_record_formula_exact, marked_records_sum_exact, unmarked_record_formula_exact,
    vandermonde_check, BoundReport, FormulaInputs,
};
use crate::model::{quadrant_counts, BasePermutation};
use crate::oracle::oracle_tables;
use crate::rng::{substream_seed, SplitMix64};
use crate::{mc, Error, Prob, Result};

/// Base-permutation family selector for scans and simulations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Identity,
    /// The shifted extremal family; the CLI token is `bmb`.
    Bmb,
    Random,
    File(PathBuf),
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Family::Identity),
            "bmb" => Ok(Family::Bmb),
            "random" => Ok(Family::Random),
            other => match other.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(Family::File(PathBuf::from(path))),
                _ => Err(Error::Usage(format!(
                    "unknown family \"{other}\" (expected identity|bmb|random|file:<path>)"
                ))),
            },
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Identity => write!(f, "identity"),
            Family::Bmb => write!(f, "bmb"),
            Family::Random => write!(f, "random"),
            Family::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

// ---------------------------------------------------------------------------
// row model and emission

/// One table cell; the emitters render it identically into CSV and JSON.
#[derive(Debug, Clone)]
pub enum Cell {
    UInt(u64),
    OptUInt(Option<u64>),
    Real(f64),
    Rational(BigRational),
    Text(String),
    Bool(bool),
}

/// A record type with a fixed column set.
pub trait Row {
    fn header() -> &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

/// Reals carry 12 significant digits in both output formats.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..=14).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

pub fn fmt_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn cell_to_csv(cell: &Cell) -> String {
    match cell {
        Cell::UInt(v) => v.to_string(),
        Cell::OptUInt(Some(v)) => v.to_string(),
        Cell::OptUInt(None) => String::new(),
        Cell::Real(x) => fmt_real(*x),
        Cell::Rational(r) => fmt_rational(r),
        Cell::Text(t) => {
            if t.contains(',') || t.contains('"') || t.contains('\n') {
                format!("\"{}\"", t.replace('"', "\"\""))
            } else {
                t.clone()
            }
        }
        Cell::Bool(b) => b.to_string(),
    }
}

fn cell_to_json(cell: &Cell) -> serde_json::Value {
    use serde_json::Value;
    match cell {
        Cell::UInt(v) => Value::from(*v),
        Cell::OptUInt(Some(v)) => Value::from(*v),
        Cell::OptUInt(None) => Value::Null,
        // parse the 12-digit rendering back so CSV and JSON carry equal values
        Cell::Real(x) => {
            let rounded: f64 = fmt_real(*x).parse().unwrap_or(*x);
            serde_json::Number::from_f64(rounded)
                .map(Value::Number)
                .unwrap_or(Value::Null)
        }
        Cell::Rational(r) => Value::from(fmt_rational(r)),
        Cell::Text(t) => Value::from(t.clone()),
        Cell::Bool(b) => Value::from(*b),
    }
}

/// Output format for [`emit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Usage(format!(
                "unknown format \"{other}\" (expected csv|json)"
            ))),
        }
    }
}

pub fn emit_csv<R: Row>(rows: &[R], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{}", R::header().join(","))?;
    for row in rows {
        let line: Vec<String> = row.cells().iter().map(cell_to_csv).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn emit_json<R: Row>(rows: &[R], out: &mut dyn Write) -> std::io::Result<()> {
    let array: Vec<serde_json::Value> = rows
        .iter()
        .map(|row| {
            let mut obj = serde_json::Map::new();
            for (name, cell) in R::header().iter().zip(row.cells()) {
                obj.insert((*name).to_string(), cell_to_json(&cell));
            }
            serde_json::Value::Object(obj)
        })
        .collect();
    writeln!(out, "{}", serde_json::to_string_pretty(&array)?)?;
    Ok(())
}

pub fn emit<R: Row>(rows: &[R], format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Csv => emit_csv(rows, out),
        Format::Json => emit_json(rows, out),
    }
}

// ---------------------------------------------------------------------------
// scan

/// One grid cell of a ratio scan: the Monte Carlo mean against the extremal
/// scale `(1-p) sqrt(n/p)`.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub family: String,
    pub n: usize,
    pub p: f64,
    pub k_used: Option<usize>,
    pub samples: u64,
    pub mean_total: f64,
    pub stderr_total: f64,
    pub scale: f64,
    pub ratio: f64,
}

impl Row for ScanRow {
    fn header() -> &'static [&'static str] {
        &[
            "family",
            "n",
            "p",
            "k_used",
            "samples",
            "mean_total",
            "stderr_total",
            "scale",
            "ratio",
        ]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text(self.family.clone()),
            Cell::UInt(self.n as u64),
            Cell::Real(self.p),
            Cell::OptUInt(self.k_used.map(|k| k as u64)),
            Cell::UInt(self.samples),
            Cell::Real(self.mean_total),
            Cell::Real(self.stderr_total),
            Cell::Real(self.scale),
            Cell::Real(self.ratio),
        ]
    }
}

// Stream tag for random base generation, so scan bases never collide with
// the per-row estimation streams.
const RANDOM_BASE_TAG: u64 = 0x5241_4E44_4241_5345;

/// Run the Monte Carlo estimator over an `(n, p)` grid and report the ratio
/// of each mean to the extremal scale. Rows come out in canonical grid order
/// (n outer, p inner); cell `i` estimates with seed `substream_seed(seed, i)`.
pub fn scan_ratio(
    family: &Family,
    n_list: &[usize],
    p_list: &[f64],
    samples: u64,
    seed: u64,
) -> Result<Vec<ScanRow>> {
    if p_list.is_empty() || n_list.is_empty() {
        return Err(Error::Usage("scan needs at least one n and one p".into()));
    }
    for &p in p_list {
        if !(0.0 < p && p < 1.0) {
            return Err(Error::Usage(format!(
                "scan requires 0 < p < 1 (the scale vanishes at p=1), got p={p}"
            )));
        }
    }
    if samples < 1 {
        return Err(Error::Usage("samples must be at least 1".into()));
    }
    let file_base = match family {
        Family::File(path) => {
            let text = std::fs::read_to_string(path)?;
            Some(parse_permutation(&text)?)
        }
        _ => None,
    };
    // a file fixes its own n; the grid then runs over p only
    let n_grid: Vec<usize> = match &file_base {
        Some(base) => vec![base.n()],
        None => n_list.to_vec(),
    };

    let mut cells = Vec::new();
    let mut row_index = 0u64;
    for &n in &n_grid {
        for &p in p_list {
            cells.push((row_index, n, p));
            row_index += 1;
        }
    }

    let rows: Vec<Result<ScanRow>> = cells
        .into_par_iter()
        .map(|(index, n, p)| {
            let (base, k_used) = match family {
                Family::Identity => (identity(n)?, None),
                Family::Bmb => (shifted(n, p, None)?, Some(shifted_k(n, p)?)),
                Family::Random => {
                    let mut rng = SplitMix64::new(substream_seed(seed ^ RANDOM_BASE_TAG, index));
                    (random_uniform(n, &mut rng), None)
                }
                Family::File(_) => (file_base.clone().expect("file base parsed above"), None),
            };
            let est = mc::estimate(&base, p, samples, substream_seed(seed, index))?;
            let scale = extremal_scale(n, p)?;
            Ok(ScanRow {
                family: family.to_string(),
                n,
                p,
                k_used,
                samples,
                mean_total: est.mean_total(),
                stderr_total: est.stderr_total(),
                scale,
                ratio: est.mean_total() / scale,
            })
        })
        .collect();
    rows.into_iter().collect()
}

// ---------------------------------------------------------------------------
// compare

/// How a literal formula value relates to the oracle's exact probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Equal,
    FormulaGreater,
    OracleGreater,
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Relation::Equal => write!(f, "equal"),
            Relation::FormulaGreater => write!(f, "formula_greater"),
            Relation::OracleGreater => write!(f, "oracle_greater"),
        }
    }
}

/// One formula-vs-oracle comparison. `ell` empty means the unmarked-record
/// sum at position `k`; `ell` set means the marked-record sum for value `ell`
/// at position `k`.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub n: usize,
    pub p: BigRational,
    pub k: usize,
    pub ell: Option<u32>,
    pub n12: usize,
    pub formula: BigRational,
    pub oracle: BigRational,
    pub relation: Relation,
}

impl Row for CompareRow {
    fn header() -> &'static [&'static str] {
        &["n", "p", "k", "ell", "n12", "formula", "oracle", "relation"]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::UInt(self.n as u64),
            Cell::Rational(self.p.clone()),
            Cell::UInt(self.k as u64),
            Cell::OptUInt(self.ell.map(|l| l as u64)),
            Cell::UInt(self.n12 as u64),
            Cell::Rational(self.formula.clone()),
            Cell::Rational(self.oracle.clone()),
            Cell::Text(self.relation.to_string()),
        ]
    }
}

/// Relation tallies, split by which formula produced the row.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CompareSummary {
    pub unmarked_equal: u64,
    pub unmarked_formula_greater: u64,
    pub unmarked_oracle_greater: u64,
    pub marked_equal: u64,
    pub marked_formula_greater: u64,
    pub marked_oracle_greater: u64,
}

impl CompareSummary {
    pub fn total_rows(&self) -> u64 {
        self.unmarked_equal
            + self.unmarked_formula_greater
            + self.unmarked_oracle_greater
            + self.marked_equal
            + self.marked_formula_greater
            + self.marked_oracle_greater
    }
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub summary: CompareSummary,
}

const COMPARE_CAP: usize = 8;
const COMPARE_FULL_SWEEP_MAX: usize = 6;

fn compare_bases(n: usize, p_real: f64) -> Result<Vec<BasePermutation>> {
    if n <= COMPARE_FULL_SWEEP_MAX {
        Ok(all_permutations(n))
    } else {
        // runtime cap: three named bases beyond the full-sweep size
        Ok(vec![identity(n)?, shifted(n, p_real, None)?, reversed(n)?])
    }
}

fn relation_of(formula: &BigRational, oracle: &BigRational) -> Relation {
    match formula.cmp(oracle) {
        std::cmp::Ordering::Equal => Relation::Equal,
        std::cmp::Ordering::Greater => Relation::FormulaGreater,
        std::cmp::Ordering::Less => Relation::OracleGreater,
    }
}

/// Compare both literal record-probability sums against the enumeration
/// oracle, for every base of every size up to `n_max` (all `n!` bases up to
/// size 6, three named families beyond), using each base's true quadrant
/// `n12`. Disagreements are reported, never patched.
pub fn compare_report(n_max: usize, p_list: &[BigRational]) -> Result<CompareReport> {
    if n_max == 0 || n_max > COMPARE_CAP {
        return Err(Error::Usage(format!(
            "compare supports 1 <= n_max <= {COMPARE_CAP}, got {n_max}"
        )));
    }
    if p_list.is_empty() {
        return Err(Error::Usage("compare needs at least one rational p".into()));
    }
    let mut rows = Vec::new();
    let mut summary = CompareSummary::default();
    for n in 1..=n_max {
        for p in p_list {
            let p_real = p.to_f64().expect("p in [0,1]");
            let bases = compare_bases(n, p_real)?;
            let base_rows: Vec<Vec<CompareRow>> = bases
                .par_iter()
                .map(|base| {
                    let tables = oracle_tables(base, p, COMPARE_CAP)
                        .expect("n <= COMPARE_CAP enforced above");
                    let prob = Prob::exact(p.clone()).expect("p validated");
                    let mut out = Vec::new();
                    for k in 1..=n {
                        let pivot = base.value_at(k).expect("k in range");
                        let n12 = quadrant_counts(base, k, pivot).expect("in range").n12;
                        let inputs = FormulaInputs::new(n, k, pivot, n12, prob.clone())
                            .expect("validated inputs");
                        let formula = unmarked_record_formula_exact(&inputs, p);
                        let oracle = tables.expectation.per_position_unmarked[k - 1].clone();
                        let relation = relation_of(&formula, &oracle);
                        out.push(CompareRow {
                            n,
                            p: p.clone(),
                            k,
                            ell: None,
                            n12,
                            formula,
                            oracle,
                            relation,
                        });
                    }
                    for l in 1..=n as u32 {
                        for k in 1..=n {
                            let n12 = quadrant_counts(base, k, l).expect("in range").n12;
                            let inputs = FormulaInputs::new(n, k, l, n12, prob.clone())
                                .expect("validated inputs");
                            let formula = marked_record_formula_exact(&inputs, p);
                            let oracle =
                                tables.marked_by_value_and_position[l as usize - 1][k - 1].clone();
                            let relation = relation_of(&formula, &oracle);
                            out.push(CompareRow {
                                n,
                                p: p.clone(),
                                k,
                                ell: Some(l),
                                n12,
                                formula,
                                oracle,
                                relation,
                            });
                        }
                    }
                    out
                })
                .collect();
            for base_row in base_rows {
                for row in base_row {
                    match (row.ell.is_some(), row.relation) {
                        (false, Relation::Equal) => summary.unmarked_equal += 1,
                        (false, Relation::FormulaGreater) => summary.unmarked_formula_greater += 1,
                        (false, Relation::OracleGreater) => summary.unmarked_oracle_greater += 1,
                        (true, Relation::Equal) => summary.marked_equal += 1,
                        (true, Relation::FormulaGreater) => summary.marked_formula_greater += 1,
                        (true, Relation::OracleGreater) => summary.marked_oracle_greater += 1,
                    }
                    rows.push(row);
                }
            }
        }
    }
    Ok(CompareReport { rows, summary })
}

// ---------------------------------------------------------------------------
// bound suite

impl Row for BoundReport {
    fn header() -> &'static [&'static str] {
        &["check", "context", "lhs", "rhs", "holds"]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text(self.check.to_string()),
            Cell::Text(self.context.clone()),
            Cell::Real(self.lhs),
            Cell::Real(self.rhs),
            Cell::Bool(self.holds),
        ]
    }
}

/// Grids for [`bounds_suite`]; the default covers the full verification grid.
#[derive(Debug, Clone)]
pub struct BoundsConfig {
    pub chain_n: Vec<usize>,
    pub chain_p: Vec<f64>,
    pub tail_n: Vec<usize>,
    pub tail_p: Vec<f64>,
    pub tail_eps: Vec<f64>,
    pub beta_max: u32,
    pub vandermonde_triples: usize,
    pub vandermonde_seed: u64,
    /// Exhaustive-base size limit for the marked-sum (sharpness) rows.
    pub marked_sum_n_max: usize,
    pub marked_sum_p: Vec<BigRational>,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig {
            chain_n: vec![10, 100, 1000, 10_000],
            chain_p: (1..=9).map(|i| i as f64 / 10.0).collect(),
            tail_n: vec![10, 100, 1000],
            tail_p: vec![0.01, 0.1, 0.5],
            tail_eps: vec![0.25, 0.5, 1.0],
            beta_max: 10,
            vandermonde_triples: 100,
            vandermonde_seed: 0x0B0D_5EED,
            marked_sum_n_max: 6,
            marked_sum_p: vec![
                BigRational::new(1.into(), 3.into()),
                BigRational::new(1.into(), 2.into()),
            ],
        }
    }
}

/// Run every bound and identity check over its grid. A report row with
/// `holds == false` is a finding; the CLI exits 1 when any row fails.
pub fn bounds_suite(cfg: &BoundsConfig) -> Result<Vec<BoundReport>> {
    let mut rows = Vec::new();
    for &n in &cfg.chain_n {
        for &p in &cfg.chain_p {
            rows.push(log_chain_check(n, p)?);
        }
    }
    for &n in &cfg.tail_n {
        for &p in &cfg.tail_p {
            for &eps in &cfg.tail_eps {
                rows.push(binom_tail_check(n, p, eps)?);
            }
        }
    }
    for a1 in 0..=cfg.beta_max {
        for a2 in 0..=cfg.beta_max {
            rows.push(beta_integral_check(a1, a2));
        }
    }
    let mut rng = SplitMix64::new(cfg.vandermonde_seed);
    for _ in 0..cfg.vandermonde_triples {
        let b1 = rng.next_below(41);
        let b2 = rng.next_below(41);
        let a = rng.next_below(b1 + b2 + 2);
        rows.push(vandermonde_check(b1, b2, a));
    }
    rows.extend(marked_sum_sharpness_rows(
        cfg.marked_sum_n_max,
        &cfg.marked_sum_p,
    )?);
    Ok(rows)
}

/// The oracle's `E[marked]` against the closed marked-records sum, for every
/// base up to `n_max`: the sum must dominate everywhere and be attained
/// exactly on the identity base only.
pub fn marked_sum_sharpness_rows(n_max: usize, p_list: &[BigRational]) -> Result<Vec<BoundReport>> {
    if n_max > COMPARE_CAP {
        return Err(Error::Usage(format!(
            "marked-sum rows support n_max <= {COMPARE_CAP}, got {n_max}"
        )));
    }
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let bases = all_permutations(n);
        for p in p_list {
            let sum = marked_records_sum_exact(n, p);
            let sum_f = sum.to_f64().expect("sum fits f64");
            let batch: Vec<BoundReport> = bases
                .par_iter()
                .map(|base| {
                    let e = oracle_tables(base, p, COMPARE_CAP)
                        .expect("n <= cap")
                        .expectation;
                    let is_identity = base
                        .values()
                        .iter()
                        .enumerate()
                        .all(|(i, &v)| v as usize == i + 1);
                    let holds = if is_identity {
                        e.e_marked == sum
                    } else {
                        e.e_marked < sum
                    };
                    BoundReport {
                        check: "marked_sum",
                        context: format!(
                            "n={n} p={} base={}",
                            fmt_rational(p),
                            crate::families::format_permutation(base)
                        ),
                        lhs: e.e_marked.to_f64().expect("fits f64"),
                        rhs: sum_f,
                        holds,
                    }
                })
                .collect();
            rows.extend(batch);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    #[test]
    fn family_parsing() {
        assert_eq!("identity".parse::<Family>().unwrap(), Family::Identity);
        assert_eq!("bmb".parse::<Family>().unwrap(), Family::Bmb);
        assert_eq!(
            "file:/tmp/x.txt".parse::<Family>().unwrap(),
            Family::File(PathBuf::from("/tmp/x.txt"))
        );
        assert!("nope".parse::<Family>().is_err());
        assert!("file:".parse::<Family>().is_err());
    }

    #[test]
    fn fmt_real_is_12_significant_digits() {
        assert_eq!(fmt_real(0.0), "0");
        assert_eq!(fmt_real(15.0), "15.0000000000");
        assert_eq!(fmt_real(0.25), "0.250000000000");
        assert_eq!(fmt_real(5.187377517639621), "5.18737751764");
        assert!(fmt_real(1e20).contains('e'));
        // round-trips to the same rounded value
        let x = 0.1234567890123456;
        let parsed: f64 = fmt_real(x).parse().unwrap();
        assert!((parsed - x).abs() < 1e-12);
    }

    #[test]
    fn emit_empty_rows_is_header_only() {
        let rows: Vec<ScanRow> = Vec::new();
        let mut buf = Vec::new();
        emit_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "family,n,p,k_used,samples,mean_total,stderr_total,scale,ratio\n"
        );
    }

    #[test]
    fn emit_scan_row_has_nine_columns() {
        let row = ScanRow {
            family: "bmb".into(),
            n: 100,
            p: 0.25,
            k_used: Some(20),
            samples: 10,
            mean_total: 12.5,
            stderr_total: 0.5,
            scale: 15.0,
            ratio: 12.5 / 15.0,
        };
        let mut buf = Vec::new();
        emit_csv(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        let data = lines.next().unwrap();
        assert_eq!(header.split(',').count(), 9);
        assert_eq!(data.split(',').count(), 9);
        assert!(data.starts_with("bmb,100,0.250000000000,20,10,"));
    }

    #[test]
    fn csv_and_json_carry_equal_values() {
        let rows = vec![ScanRow {
            family: "identity".into(),
            n: 10,
            p: 0.5,
            k_used: None,
            samples: 7,
            mean_total: 2.345678901234567,
            stderr_total: 0.001,
            scale: 2.23606797749979,
            ratio: 1.049,
        }];
        let mut csv = Vec::new();
        emit_csv(&rows, &mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        let data: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();

        let mut json = Vec::new();
        emit_json(&rows, &mut json).unwrap();
        let parsed: serde_json::Value = serde_json::from_slice(&json).unwrap();
        let obj = &parsed[0];

        assert_eq!(obj["family"], "identity");
        assert_eq!(obj["n"], 10);
        assert_eq!(obj["k_used"], serde_json::Value::Null);
        assert_eq!(data[3], ""); // k_used empty in CSV
        for (idx, field) in [
            (5usize, "mean_total"),
            (6, "stderr_total"),
            (7, "scale"),
            (8, "ratio"),
        ] {
            let csv_val: f64 = data[idx].parse().unwrap();
            assert_eq!(csv_val, obj[field].as_f64().unwrap(), "field {field}");
        }
    }

    #[test]
    fn scan_rejects_degenerate_p() {
        let err = scan_ratio(&Family::Identity, &[10], &[0.5, 1.0], 10, 1).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
        let err = scan_ratio(&Family::Identity, &[10], &[0.0], 10, 1).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn scan_is_deterministic_and_ordered() {
        let rows1 = scan_ratio(&Family::Bmb, &[50, 100], &[0.25, 0.5], 200, 42).unwrap();
        let rows2 = scan_ratio(&Family::Bmb, &[50, 100], &[0.25, 0.5], 200, 42).unwrap();
        assert_eq!(rows1.len(), 4);
        let order: Vec<(usize, f64)> = rows1.iter().map(|r| (r.n, r.p)).collect();
        assert_eq!(order, vec![(50, 0.25), (50, 0.5), (100, 0.25), (100, 0.5)]);
        for (a, b) in rows1.iter().zip(&rows2) {
            assert_eq!(a.mean_total.to_bits(), b.mean_total.to_bits());
            assert_eq!(a.k_used, b.k_used);
        }
        let mut csv1 = Vec::new();
        let mut csv2 = Vec::new();
        emit_csv(&rows1, &mut csv1).unwrap();
        emit_csv(&rows2, &mut csv2).unwrap();
        assert_eq!(csv1, csv2);
    }

    #[test]
    fn compare_documented_case() {
        let report = compare_report(2, &[ratio(1, 2)]).unwrap();
        // the n=2, k=2 identity-base row: formula 1/4, oracle 1/2
        let row = report
            .rows
            .iter()
            .find(|r| {
                r.n == 2 && r.k == 2 && r.ell.is_none() && r.n12 == 0 && r.formula == ratio(1, 4)
            })
            .expect("documented disagreement row");
        assert_eq!(row.oracle, ratio(1, 2));
        assert_eq!(row.relation, Relation::OracleGreater);
        assert_eq!(report.summary.total_rows(), report.rows.len() as u64);
    }

    #[test]
    fn compare_k1_rows_are_equal() {
        let report = compare_report(4, &[ratio(1, 2)]).unwrap();
        for row in report.rows.iter().filter(|r| r.ell.is_none() && r.k == 1) {
            assert_eq!(row.relation, Relation::Equal, "row {row:?}");
            assert_eq!(row.formula, ratio(1, 2)); // 1 - p
        }
    }

    #[test]
    fn compare_rejects_oversize() {
        assert!(matches!(
            compare_report(9, &[ratio(1, 2)]),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn bounds_suite_small_grid_holds() {
        let cfg = BoundsConfig {
            chain_n: vec![10, 100],
            chain_p: vec![0.1, 0.5, 0.9],
            tail_n: vec![10, 100],
            tail_p: vec![0.1, 0.5],
            tail_eps: vec![0.5, 1.0],
            beta_max: 4,
            vandermonde_triples: 10,
            marked_sum_n_max: 4,
            ..BoundsConfig::default()
        };
        let rows = bounds_suite(&cfg).unwrap();
        assert!(
            rows.iter().all(|r| r.holds),
            "all default-grid rows must hold"
        );
        // one row per marked-sum base/p pair, among others
        assert!(rows.iter().any(|r| r.check == "marked_sum"));
        assert!(rows.iter().any(|r| r.check == "log_chain"));
    }
}
