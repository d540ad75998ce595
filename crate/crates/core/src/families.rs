//! Constructors for the base permutations under study, plus the one-line
//! text format used by the CLI and permutation files.

use crate::model::BasePermutation;
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// The ascending permutation `(1, 2, ..., n)`.
pub fn identity(n: usize) -> Result<BasePermutation> {
    if n == 0 {
        return Err(Error::Domain("identity requires n >= 1".into()));
    }
    BasePermutation::new((1..=n as u32).collect())
}

/// The descending permutation `(n, n-1, ..., 1)`.
pub fn reversed(n: usize) -> Result<BasePermutation> {
    if n == 0 {
        return Err(Error::Domain("reversed requires n >= 1".into()));
    }
    BasePermutation::new((1..=n as u32).rev().collect())
}

/// The shifted extremal family `(n-k, n-k+1, ..., n, 1, 2, ..., n-k-1)` with
/// `k = floor(sqrt(n/p))` unless overridden, clamped to `[1, n-1]`.
///
/// The clamp keeps grid scans total at their corners (`k = n-1` degenerates to
/// the identity); scan output records the `k` actually used.
pub fn shifted(n: usize, p: f64, k_override: Option<usize>) -> Result<BasePermutation> {
    if n < 2 {
        return Err(Error::Domain("shifted family requires n >= 2".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability {p} not in [0,1]")));
    }
    let k = match k_override {
        Some(k) => {
            if k == 0 {
                return Err(Error::Domain("k override must be >= 1".into()));
            }
            k
        }
        None => {
            if p == 0.0 {
                return Err(Error::Domain(
                    "k = floor(sqrt(n/p)) is undefined at p = 0; pass an explicit k".into(),
                ));
            }
            // The nudge absorbs representation error of decimal p, so e.g.
            // n=10, p=0.4 lands on k=5 rather than 4.
            ((n as f64 / p).sqrt() + 1e-9).floor() as usize
        }
    };
    let k = k.clamp(1, n - 1);
    let mut values: Vec<u32> = ((n - k) as u32..=n as u32).collect();
    values.extend(1..(n - k) as u32);
    BasePermutation::new(values)
}

/// The `k` that [`shifted`] would use for `(n, p)` without an override.
pub fn shifted_k(n: usize, p: f64) -> Result<usize> {
    if n < 2 {
        return Err(Error::Domain("shifted family requires n >= 2".into()));
    }
    if p <= 0.0 || p > 1.0 {
        return Err(Error::Domain(format!("need 0 < p <= 1, got {p}")));
    }
    Ok((((n as f64 / p).sqrt() + 1e-9).floor() as usize).clamp(1, n - 1))
}

/// Uniformly random permutation of `[1..n]` via the unbiased shuffle;
/// deterministic for a fixed stream.
pub fn random_uniform(n: usize, rng: &mut SplitMix64) -> BasePermutation {
    let mut values: Vec<u32> = (1..=n as u32).collect();
    for i in 0..n.saturating_sub(1) {
        let j = i + rng.next_below((n - i) as u64) as usize;
        values.swap(i, j);
    }
    BasePermutation::new(values).expect("shuffled identity is a permutation")
}

/// Every permutation of `[1..n]`, in Heap's-algorithm order.
pub fn all_permutations(n: usize) -> Vec<BasePermutation> {
    let mut out = Vec::new();
    let mut vals: Vec<u32> = (1..=n as u32).collect();
    crate::model::for_each_permutation(&mut vals, |perm| {
        out.push(BasePermutation::new(perm.to_vec()).expect("generated permutation"));
    });
    out
}

/// Parse the one-line format: space-separated 1-indexed values, e.g. `"3 1 2"`.
pub fn parse_permutation(text: &str) -> Result<BasePermutation> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.is_empty() {
        return Err(Error::Parse("empty permutation input".into()));
    }
    let n = tokens.len();
    let mut values = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for tok in tokens {
        let v: u32 = tok
            .parse()
            .map_err(|_| Error::Parse(format!("non-integer token \"{tok}\"")))?;
        if v < 1 || v as usize > n {
            return Err(Error::Parse(format!(
                "value {v} out of range 1..={n} (token \"{tok}\")"
            )));
        }
        if seen[v as usize - 1] {
            return Err(Error::Parse(format!(
                "duplicate value {v} (token \"{tok}\")"
            )));
        }
        seen[v as usize - 1] = true;
        values.push(v);
    }
    BasePermutation::new(values)
}

/// Inverse of [`parse_permutation`]: one line, space separated, no newline.
pub fn format_permutation(base: &BasePermutation) -> String {
    base.values()
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}
