//! Reproducible Monte Carlo estimation of expected record counts for
//! parameter regimes beyond the exact oracle's cap.
//!
//! Replica `i` of a run draws from its own stream seeded with
//! `substream_seed(seed, i)`, so scheduling can never affect results. Record
//! tallies are small integers, so the accumulators are exact integer moments
//! (`sum` in u64, `sum of squares` in u128): addition is associative and
//! lossless, which makes every estimate bit-identical across thread counts
//! and makes [`merge`](MCEstimate::merge) of disjoint replica ranges equal a
//! single run over their union, bit for bit. Means and variances are derived
//! from the integer moments on demand.

use rayon::prelude::*;
use serde::Serialize;

use crate::model::{apply_partial_shuffle, count_records, BasePermutation};
use crate::rng::{mix64, substream_seed, SplitMix64};
use crate::{Error, Result};

/// Fingerprint of a run configuration; merges refuse to mix configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct RunConfig {
    n: usize,
    p_bits: u64,
    seed: u64,
    base_hash: u64,
}

fn hash_base(base: &BasePermutation) -> u64 {
    let mut h = 0x243F_6A88_85A3_08D3u64;
    for &v in base.values() {
        h = mix64(h ^ v as u64);
    }
    h
}

/// Exact integer moments of one statistic.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Moments {
    sum: u64,
    sum_sq: u128,
}

impl Moments {
    fn add_sample(&mut self, x: u64) {
        self.sum += x;
        self.sum_sq += (x as u128) * (x as u128);
    }

    fn combine(&self, other: &Moments) -> Moments {
        Moments {
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
        }
    }

    fn mean(&self, samples: u64) -> f64 {
        self.sum as f64 / samples as f64
    }

    /// Unbiased sample variance from exact moments:
    /// `(samples * sum_sq - sum^2) / (samples * (samples - 1))`.
    fn variance(&self, samples: u64) -> f64 {
        if samples < 2 {
            return 0.0;
        }
        let num = samples as i128 * self.sum_sq as i128 - (self.sum as i128) * (self.sum as i128);
        let den = samples as f64 * (samples as f64 - 1.0);
        (num as f64 / den).max(0.0)
    }
}

/// A Monte Carlo estimate of `E[total]`, `E[unmarked]`, `E[marked]` with
/// unbiased sample variances, the replica range it covers, and its seed
/// lineage.
#[derive(Debug, Clone, PartialEq)]
pub struct MCEstimate {
    config: RunConfig,
    p: f64,
    replica_start: u64,
    samples: u64,
    unmarked: Moments,
    marked: Moments,
    total: Moments,
}

/// Serialized view: every field needed to audit the estimate.
#[derive(Debug, Serialize)]
pub struct MCEstimateRecord {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub replica_start: u64,
    pub samples: u64,
    pub mean_total: f64,
    pub mean_unmarked: f64,
    pub mean_marked: f64,
    pub var_total: f64,
    pub var_unmarked: f64,
    pub var_marked: f64,
    pub sum_total: u64,
    pub sum_unmarked: u64,
    pub sum_marked: u64,
}

impl MCEstimate {
    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mean_unmarked(&self) -> f64 {
        self.unmarked.mean(self.samples)
    }

    pub fn mean_marked(&self) -> f64 {
        self.marked.mean(self.samples)
    }

    /// Computed as `mean_unmarked + mean_marked`, so the partition identity
    /// `mean_total - mean_unmarked - mean_marked = 0` holds exactly.
    pub fn mean_total(&self) -> f64 {
        self.mean_unmarked() + self.mean_marked()
    }

    pub fn var_total(&self) -> f64 {
        self.total.variance(self.samples)
    }

    pub fn var_unmarked(&self) -> f64 {
        self.unmarked.variance(self.samples)
    }

    pub fn var_marked(&self) -> f64 {
        self.marked.variance(self.samples)
    }

    pub fn stderr_total(&self) -> f64 {
        (self.var_total() / self.samples as f64).sqrt()
    }

    /// Pool this estimate with one from an adjacent replica range of the same
    /// `(base, p, seed)` configuration. The result is identical, bit for bit,
    /// to a single run over the union of the two ranges.
    pub fn merge(&self, other: &MCEstimate) -> Result<MCEstimate> {
        if self.config != other.config {
            return Err(Error::MergeMismatch(
                "estimates come from different (base, p, seed) configurations".into(),
            ));
        }
        let (lo, hi) = if self.replica_start <= other.replica_start {
            (self, other)
        } else {
            (other, self)
        };
        if hi.samples == 0 && lo.samples == 0 {
            return Ok(lo.clone());
        }
        if lo.replica_start + lo.samples != hi.replica_start && hi.samples != 0 && lo.samples != 0 {
            return Err(Error::MergeMismatch(format!(
                "replica ranges [{}, {}) and [{}, {}) do not tile a contiguous range",
                lo.replica_start,
                lo.replica_start + lo.samples,
                hi.replica_start,
                hi.replica_start + hi.samples
            )));
        }
        let start = if lo.samples == 0 && hi.samples != 0 {
            hi.replica_start
        } else {
            lo.replica_start
        };
        Ok(MCEstimate {
            config: self.config,
            p: self.p,
            replica_start: start,
            samples: lo.samples + hi.samples,
            unmarked: lo.unmarked.combine(&hi.unmarked),
            marked: lo.marked.combine(&hi.marked),
            total: lo.total.combine(&hi.total),
        })
    }

    /// `z * sqrt(var / samples)` for (total, unmarked, marked).
    pub fn ci_halfwidth(&self, z: f64) -> Result<(f64, f64, f64)> {
        if self.samples < 2 {
            return Err(Error::Domain(format!(
                "confidence halfwidth needs at least 2 samples, have {}",
                self.samples
            )));
        }
        let s = self.samples as f64;
        Ok((
            z * (self.var_total() / s).sqrt(),
            z * (self.var_unmarked() / s).sqrt(),
            z * (self.var_marked() / s).sqrt(),
        ))
    }

    pub fn record(&self) -> MCEstimateRecord {
        MCEstimateRecord {
            n: self.config.n,
            p: self.p,
            seed: self.config.seed,
            replica_start: self.replica_start,
            samples: self.samples,
            mean_total: self.mean_total(),
            mean_unmarked: self.mean_unmarked(),
            mean_marked: self.mean_marked(),
            var_total: self.var_total(),
            var_unmarked: self.var_unmarked(),
            var_marked: self.var_marked(),
            sum_total: self.total.sum,
            sum_unmarked: self.unmarked.sum,
            sum_marked: self.marked.sum,
        }
    }
}

/// Estimate record-count expectations from `samples` independent replicas.
pub fn estimate(base: &BasePermutation, p: f64, samples: u64, seed: u64) -> Result<MCEstimate> {
    if samples < 1 {
        return Err(Error::Domain("samples must be at least 1".into()));
    }
    estimate_range(base, p, 0, samples, seed)
}

/// Replicas `[start, start + len)` of the run `(base, p, seed)`; building a
/// run in pieces and merging gives the same bits as one call.
pub fn estimate_range(
    base: &BasePermutation,
    p: f64,
    start: u64,
    len: u64,
    seed: u64,
) -> Result<MCEstimate> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability {p} not in [0,1]")));
    }
    let config = RunConfig {
        n: base.n(),
        p_bits: p.to_bits(),
        seed,
        base_hash: hash_base(base),
    };
    let (unmarked, marked, total) = (start..start + len)
        .into_par_iter()
        .fold(
            || (Moments::default(), Moments::default(), Moments::default()),
            |(mut u, mut m, mut t), replica| {
                let mut rng = SplitMix64::new(substream_seed(seed, replica));
                let x = apply_partial_shuffle(base, p, &mut rng);
                let tally = count_records(&x);
                u.add_sample(tally.unmarked as u64);
                m.add_sample(tally.marked as u64);
                t.add_sample(tally.total as u64);
                (u, m, t)
            },
        )
        .reduce(
            || (Moments::default(), Moments::default(), Moments::default()),
            |a, b| (a.0.combine(&b.0), a.1.combine(&b.1), a.2.combine(&b.2)),
        );
    Ok(MCEstimate {
        config,
        p,
        replica_start: start,
        samples: len,
        unmarked,
        marked,
        total,
    })
}
