//! Ground-truth expectations and event probabilities by exhaustive
//! enumeration, in exact rational arithmetic.
//!
//! The enumeration realizes the process definition literally: every one of the
//! `2^n` markings with weight `p^m (1-p)^(n-m)`, and for each marking every
//! one of the `m!` arrangements of the marked values with weight `1/m!`
//! (roughly `e * n!` outcomes in total, so the default caps keep runtime in
//! seconds). Arithmetic is exact throughout; `p` is accepted only as a
//! rational so that equality claims are decided exactly, never within a
//! floating tolerance.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::model::BasePermutation;
use crate::{Error, Result};

/// Default cap for [`exact_expectations`] and the event-probability queries.
pub const DEFAULT_EXPECTATION_CAP: usize = 10;
/// Default cap for [`exhaustive_max`], which enumerates all `n!` bases.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 7;
/// Ceilings a user-supplied cap cannot exceed; enumeration cost is already
/// absurd well before these.
const MAX_EXPECTATION_CAP: usize = 20;
const MAX_EXHAUSTIVE_CAP: usize = 9;

/// Exact expectations and per-event probability tables for one `(base, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactExpectation {
    pub e_total: BigRational,
    pub e_unmarked: BigRational,
    pub e_marked: BigRational,
    /// `P(A_k)`: position k (1-indexed) holds an unmarked record.
    pub per_position_unmarked: Vec<BigRational>,
    /// `P(B_l)`: value l is a marked record.
    pub per_value_marked: Vec<BigRational>,
}

/// Full sweep output: the expectation summary plus the `P(B_{l,k})` table.
#[derive(Debug, Clone)]
pub struct OracleTables {
    pub expectation: ExactExpectation,
    /// `marked_by_value_and_position[l-1][k-1] = P(B_{l,k})`.
    pub marked_by_value_and_position: Vec<Vec<BigRational>>,
}

/// Which expectation [`exhaustive_max`] maximizes over all bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Total,
    Unmarked,
    Marked,
}

impl std::str::FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "total" => Ok(Objective::Total),
            "unmarked" => Ok(Objective::Unmarked),
            "marked" => Ok(Objective::Marked),
            other => Err(Error::Usage(format!(
                "unknown objective \"{other}\" (expected total|unmarked|marked)"
            ))),
        }
    }
}

fn check_p(p: &BigRational) -> Result<()> {
    if p < &BigRational::zero() || p > &BigRational::one() {
        return Err(Error::Domain(format!("probability {p} not in [0,1]")));
    }
    Ok(())
}

use crate::model::for_each_permutation;

/// Integer event counts from one full enumeration, bucketed by marking size m
/// so the exact weights `p^m (1-p)^(n-m) / m!` multiply in once per bucket.
struct SweepCounts {
    n: usize,
    /// `a[m][k0]`: outcomes with an unmarked record at position k0+1.
    a: Vec<Vec<u64>>,
    /// `b[m][l0][k0]`: outcomes where value l0+1 is a marked record at k0+1.
    b: Vec<Vec<Vec<u64>>>,
    /// `(marking, arrangement)` pairs per m, for the normalization check.
    pairs: Vec<u64>,
}

fn enumerate_counts(base: &BasePermutation) -> SweepCounts {
    let n = base.n();
    let mut counts = SweepCounts {
        n,
        a: vec![vec![0; n]; n + 1],
        b: vec![vec![vec![0; n]; n]; n + 1],
        pairs: vec![0; n + 1],
    };
    let mut realized = base.values().to_vec();
    for mask in 0u64..(1u64 << n) {
        let m = mask.count_ones() as usize;
        let slots: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let mut vals: Vec<u32> = slots.iter().map(|&i| base.values()[i]).collect();
        realized.copy_from_slice(base.values());
        let a_bucket = &mut counts.a[m];
        let b_bucket = &mut counts.b[m];
        let pairs = &mut counts.pairs[m];
        for_each_permutation(&mut vals, |arrangement| {
            for (&s, &v) in slots.iter().zip(arrangement) {
                realized[s] = v;
            }
            *pairs += 1;
            let mut best = 0u32;
            for (pos, &v) in realized.iter().enumerate() {
                if v > best {
                    best = v;
                    if mask >> pos & 1 == 1 {
                        b_bucket[v as usize - 1][pos] += 1;
                    } else {
                        a_bucket[pos] += 1;
                    }
                }
            }
        });
    }
    counts
}

/// Exact weight per (marking of size m, arrangement) pair: `p^m q^(n-m) / m!`.
fn bucket_weights(n: usize, p: &BigRational) -> Vec<BigRational> {
    let q = BigRational::one() - p;
    let mut weights = Vec::with_capacity(n + 1);
    let mut p_pow = BigRational::one();
    let mut factorial = BigInt::one();
    for m in 0..=n {
        if m > 0 {
            p_pow *= p;
            factorial *= BigInt::from(m);
        }
        let mut w = p_pow.clone();
        for _ in 0..(n - m) {
            w *= &q;
        }
        weights.push(w / BigRational::from_integer(factorial.clone()));
    }
    weights
}

fn rational_from_u64(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn tables_from_counts(counts: &SweepCounts, p: &BigRational) -> OracleTables {
    let n = counts.n;
    let weights = bucket_weights(n, p);

    // Normalization: the pair weights must sum to exactly 1.
    let mut norm = BigRational::zero();
    for (&pairs, w) in counts.pairs.iter().zip(&weights) {
        norm += rational_from_u64(pairs) * w;
    }
    assert!(
        norm.is_one(),
        "enumeration weights must sum to 1, got {norm}"
    );

    let mut per_position_unmarked = vec![BigRational::zero(); n];
    let mut marked_by_value_and_position = vec![vec![BigRational::zero(); n]; n];
    for ((a_bucket, b_bucket), w) in counts.a.iter().zip(&counts.b).zip(&weights) {
        for (acc, &count) in per_position_unmarked.iter_mut().zip(a_bucket) {
            if count > 0 {
                *acc += rational_from_u64(count) * w;
            }
        }
        for (acc_row, count_row) in marked_by_value_and_position.iter_mut().zip(b_bucket) {
            for (acc, &count) in acc_row.iter_mut().zip(count_row) {
                if count > 0 {
                    *acc += rational_from_u64(count) * w;
                }
            }
        }
    }

    let per_value_marked: Vec<BigRational> = marked_by_value_and_position
        .iter()
        .map(|row| row.iter().sum())
        .collect();
    let e_unmarked: BigRational = per_position_unmarked.iter().sum();
    let e_marked: BigRational = per_value_marked.iter().sum();
    let e_total = &e_unmarked + &e_marked;

    OracleTables {
        expectation: ExactExpectation {
            e_total,
            e_unmarked,
            e_marked,
            per_position_unmarked,
            per_value_marked,
        },
        marked_by_value_and_position,
    }
}

/// Full enumeration detail for one `(base, p)`, including `P(B_{l,k})`.
pub fn oracle_tables(base: &BasePermutation, p: &BigRational, cap: usize) -> Result<OracleTables> {
    check_p(p)?;
    let n = base.n();
    let cap = cap.min(MAX_EXPECTATION_CAP);
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(tables_from_counts(&enumerate_counts(base), p))
}

/// Exact `E[total]`, `E[unmarked]`, `E[marked]` and the per-event tables,
/// under the default cap.
pub fn exact_expectations(base: &BasePermutation, p: &BigRational) -> Result<ExactExpectation> {
    exact_expectations_with_cap(base, p, DEFAULT_EXPECTATION_CAP)
}

pub fn exact_expectations_with_cap(
    base: &BasePermutation,
    p: &BigRational,
    cap: usize,
) -> Result<ExactExpectation> {
    Ok(oracle_tables(base, p, cap)?.expectation)
}

/// Exact `P(A_k)`: position `k` (1-indexed) holds an unmarked record.
pub fn prob_unmarked_record_at(
    base: &BasePermutation,
    p: &BigRational,
    k: usize,
) -> Result<BigRational> {
    if k < 1 || k > base.n() {
        return Err(Error::Domain(format!(
            "position {k} out of range 1..={}",
            base.n()
        )));
    }
    let tables = oracle_tables(base, p, DEFAULT_EXPECTATION_CAP)?;
    Ok(tables.expectation.per_position_unmarked[k - 1].clone())
}

/// Exact `P(B_l)` (value `l` is a marked record), or `P(B_{l,k})` when a
/// position is given.
pub fn prob_marked_record(
    base: &BasePermutation,
    p: &BigRational,
    l: u32,
    k: Option<usize>,
) -> Result<BigRational> {
    let n = base.n();
    if l < 1 || l as usize > n {
        return Err(Error::Domain(format!("value {l} out of range 1..={n}")));
    }
    if let Some(k) = k {
        if k < 1 || k > n {
            return Err(Error::Domain(format!("position {k} out of range 1..={n}")));
        }
    }
    let tables = oracle_tables(base, p, DEFAULT_EXPECTATION_CAP)?;
    Ok(match k {
        Some(k) => tables.marked_by_value_and_position[l as usize - 1][k - 1].clone(),
        None => tables.expectation.per_value_marked[l as usize - 1].clone(),
    })
}

/// Scan all `n!` bases and return the argmax set (sorted lexicographically)
/// and the maximal expectation for the chosen objective.
pub fn exhaustive_max(
    n: usize,
    p: &BigRational,
    objective: Objective,
) -> Result<(Vec<BasePermutation>, BigRational)> {
    exhaustive_max_with_cap(n, p, objective, DEFAULT_EXHAUSTIVE_CAP)
}

pub fn exhaustive_max_with_cap(
    n: usize,
    p: &BigRational,
    objective: Objective,
    cap: usize,
) -> Result<(Vec<BasePermutation>, BigRational)> {
    check_p(p)?;
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let cap = cap.min(MAX_EXHAUSTIVE_CAP);
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }

    let mut all_bases = Vec::new();
    let mut vals: Vec<u32> = (1..=n as u32).collect();
    for_each_permutation(&mut vals, |perm| {
        all_bases.push(perm.to_vec());
    });

    // Each base evaluates independently; ties reduce order-independently
    // because values compare exactly and the final set is sorted.
    let scored: Vec<(Vec<u32>, BigRational)> = all_bases
        .into_par_iter()
        .map(|values| {
            let base = BasePermutation::new(values.clone()).expect("generated permutation");
            let e = tables_from_counts(&enumerate_counts(&base), p).expectation;
            let score = match objective {
                Objective::Total => e.e_total,
                Objective::Unmarked => e.e_unmarked,
                Objective::Marked => e.e_marked,
            };
            (values, score)
        })
        .collect();

    let best = scored
        .iter()
        .map(|(_, s)| s)
        .max()
        .expect("n >= 1 yields at least one base")
        .clone();
    let mut argmax: Vec<Vec<u32>> = scored
        .into_iter()
        .filter(|(_, s)| *s == best)
        .map(|(v, _)| v)
        .collect();
    argmax.sort();
    let argmax = argmax
        .into_iter()
        .map(|v| BasePermutation::new(v).expect("generated permutation"))
        .collect();
    Ok((argmax, best))
}
