//! The p-partial permutation process: base permutations, markings, realized
//! outcomes, record tallies, and the quadrant decomposition around a pivot.
//!
//! Positions and values are 1-indexed in the public API, matching the one-line
//! text format (`"3 1 2"`). Internally everything is 0-indexed.

use crate::rng::SplitMix64;
use crate::{Error, Result};

/// An arrangement of `[1..n]` fixed before any randomization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasePermutation {
    values: Vec<u32>,
}

impl BasePermutation {
    /// Validates that `values` is a permutation of `[1..n]`, `n >= 1`.
    pub fn new(values: Vec<u32>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::Domain("permutation must have length >= 1".into()));
        }
        let mut seen = vec![false; n];
        for &v in &values {
            if v < 1 || v as usize > n {
                return Err(Error::Domain(format!(
                    "value {v} out of range 1..={n} for a permutation"
                )));
            }
            if seen[v as usize - 1] {
                return Err(Error::Domain(format!("duplicate value {v} in permutation")));
            }
            seen[v as usize - 1] = true;
        }
        Ok(BasePermutation { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// Value at 1-indexed position `k`.
    pub fn value_at(&self, k: usize) -> Result<u32> {
        if k < 1 || k > self.n() {
            return Err(Error::Domain(format!(
                "position {k} out of range 1..={}",
                self.n()
            )));
        }
        Ok(self.values[k - 1])
    }
}

/// Which positions of a base permutation were selected for shuffling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marking {
    marked: Vec<bool>,
}

impl Marking {
    pub fn new(marked: Vec<bool>) -> Self {
        Marking { marked }
    }

    /// One Bernoulli(p) draw per position, in position order 1..n.
    pub fn sample(n: usize, p: f64, rng: &mut SplitMix64) -> Self {
        Marking {
            marked: (0..n).map(|_| rng.bernoulli(p)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.marked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marked.is_empty()
    }

    pub fn is_marked(&self, pos0: usize) -> bool {
        self.marked[pos0]
    }

    /// Number of marked positions.
    pub fn count(&self) -> usize {
        self.marked.iter().filter(|&&m| m).count()
    }

    /// Marked positions, 0-indexed, ascending.
    pub fn positions(&self) -> Vec<usize> {
        (0..self.marked.len()).filter(|&i| self.marked[i]).collect()
    }

    pub fn flags(&self) -> &[bool] {
        &self.marked
    }
}

/// An outcome of the process: final values plus a per-position flag telling
/// whether the element now at that position was marked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizedPermutation {
    values: Vec<u32>,
    marked_value: Vec<bool>,
}

impl RealizedPermutation {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn marks(&self) -> &[bool] {
        &self.marked_value
    }
}

/// Record counts of one outcome, split by mark status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecordTally {
    pub total: u32,
    pub unmarked: u32,
    pub marked: u32,
}

/// Sizes of the four sets splitting the other elements of a base permutation
/// by position (before/after `k`) and value (below/above the pivot value).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadrantCounts {
    pub n11: usize,
    pub n12: usize,
    pub n21: usize,
    pub n22: usize,
}

impl QuadrantCounts {
    /// Elements below the pivot value, on either side: `n11 + n21`.
    ///
    /// When the pivot value `v` sits at position `k` this equals `v - 1`;
    /// when it does not, it equals `v - 1` minus one if the element at `k`
    /// is itself below `v` (that element belongs to no quadrant).
    pub fn below_pivot(&self) -> usize {
        self.n11 + self.n21
    }

    pub fn sum(&self) -> usize {
        self.n11 + self.n12 + self.n21 + self.n22
    }
}

/// Mark each position independently with probability `p`, then permute the
/// marked values uniformly among the marked slots. Unmarked values stay put.
///
/// Draw order is fixed: n Bernoulli draws in position order, then the shuffle
/// draws; `(seed -> outcome)` is a stable contract.
pub fn apply_partial_shuffle(
    base: &BasePermutation,
    p: f64,
    rng: &mut SplitMix64,
) -> RealizedPermutation {
    let marking = Marking::sample(base.n(), p, rng);
    shuffle_marked(base, &marking, rng)
}

/// The shuffle half of [`apply_partial_shuffle`], for callers that sampled or
/// constructed the marking themselves.
pub fn shuffle_marked(
    base: &BasePermutation,
    marking: &Marking,
    rng: &mut SplitMix64,
) -> RealizedPermutation {
    debug_assert_eq!(marking.len(), base.n());
    let mut values = base.values().to_vec();
    let slots = marking.positions();
    let mut marked_values: Vec<u32> = slots.iter().map(|&i| values[i]).collect();
    fisher_yates(&mut marked_values, rng);
    for (slot, v) in slots.iter().zip(marked_values) {
        values[*slot] = v;
    }
    RealizedPermutation {
        values,
        marked_value: marking.flags().to_vec(),
    }
}

/// In-place unbiased swap shuffle (uniformity is property-tested, not assumed).
fn fisher_yates(values: &mut [u32], rng: &mut SplitMix64) {
    let n = values.len();
    for i in 0..n.saturating_sub(1) {
        let j = i + rng.next_below((n - i) as u64) as usize;
        values.swap(i, j);
    }
}

/// Deterministic kernel shared by the sampler and the oracle: place
/// `arrangement` (one value per marked slot, in slot order) into the marked
/// slots, keep unmarked values fixed.
///
/// Errors if `arrangement` is not a bijection of the marked values.
pub fn realize(
    base: &BasePermutation,
    marking: &Marking,
    arrangement: &[u32],
) -> Result<RealizedPermutation> {
    if marking.len() != base.n() {
        return Err(Error::Domain(format!(
            "marking length {} does not match n={}",
            marking.len(),
            base.n()
        )));
    }
    let slots = marking.positions();
    if arrangement.len() != slots.len() {
        return Err(Error::InvalidArrangement(format!(
            "arrangement has {} values for {} marked slots",
            arrangement.len(),
            slots.len()
        )));
    }
    let mut expected: Vec<u32> = slots.iter().map(|&i| base.values()[i]).collect();
    let mut given = arrangement.to_vec();
    expected.sort_unstable();
    given.sort_unstable();
    if expected != given {
        return Err(Error::InvalidArrangement(
            "arrangement is not a permutation of the marked values".into(),
        ));
    }
    let mut values = base.values().to_vec();
    for (slot, v) in slots.iter().zip(arrangement) {
        values[*slot] = *v;
    }
    Ok(RealizedPermutation {
        values,
        marked_value: marking.flags().to_vec(),
    })
}

/// Count left-to-right maxima, split by the record position's mark flag.
pub fn count_records(x: &RealizedPermutation) -> RecordTally {
    let mut tally = RecordTally {
        total: 0,
        unmarked: 0,
        marked: 0,
    };
    let mut best = 0u32;
    for (v, &m) in x.values.iter().zip(&x.marked_value) {
        if *v > best {
            best = *v;
            tally.total += 1;
            if m {
                tally.marked += 1;
            } else {
                tally.unmarked += 1;
            }
        }
    }
    tally
}

/// Iterative Heap's algorithm; calls `visit` for every permutation of `vals`,
/// starting with the current order.
pub(crate) fn for_each_permutation(vals: &mut [u32], mut visit: impl FnMut(&[u32])) {
    let n = vals.len();
    visit(vals);
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                vals.swap(0, i);
            } else {
                vals.swap(c[i], i);
            }
            visit(vals);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Quadrant counts of `base` split at position `k` (1-indexed) by value `v`:
/// `n11 = #{a < k : x_a < v}`, `n12 = #{a < k : x_a > v}`,
/// `n21 = #{a > k : x_a < v}`, `n22 = #{a > k : x_a > v}`.
///
/// The sets range over positions `a != k`, so the element at `k` itself is
/// never counted; the four counts sum to `n - 1` exactly when `v` equals the
/// value at `k`, and to `n - 2` otherwise.
pub fn quadrant_counts(base: &BasePermutation, k: usize, v: u32) -> Result<QuadrantCounts> {
    let n = base.n();
    if k < 1 || k > n {
        return Err(Error::Domain(format!("position {k} out of range 1..={n}")));
    }
    if v < 1 || v as usize > n {
        return Err(Error::Domain(format!("value {v} out of range 1..={n}")));
    }
    let mut q = QuadrantCounts {
        n11: 0,
        n12: 0,
        n21: 0,
        n22: 0,
    };
    for (i, &x) in base.values().iter().enumerate() {
        if i + 1 == k || x == v {
            continue;
        }
        match (i + 1 < k, x < v) {
            (true, true) => q.n11 += 1,
            (true, false) => q.n12 += 1,
            (false, true) => q.n21 += 1,
            (false, false) => q.n22 += 1,
        }
    }
    Ok(q)
}
