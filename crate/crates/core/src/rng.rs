//! Deterministic 64-bit random stream.
//!
//! Every random draw in this crate goes through [`SplitMix64`], a counter-style
//! generator with a fixed, documented state advance: each call adds the golden
//! ratio constant `0x9E3779B97F4A7C15` to the state and returns
//! [`mix64`] of the new state. Runs are therefore bit-reproducible for a fixed
//! seed, on every platform and under any degree of parallelism (parallel code
//! derives one sub-stream per work item via [`substream_seed`] and never shares
//! a stream).

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Avalanche-quality 64-bit finalizer (the splitmix64 output function).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sub-stream seed for work item `index` of a run seeded with `seed`.
///
/// Defined as `mix64(seed ^ mix64(index + GOLDEN))`; fixed so that replica
/// scheduling can never affect results.
#[inline]
pub fn substream_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index.wrapping_add(GOLDEN)))
}

/// Seedable counter-style generator; state advances by `GOLDEN` per draw.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform double in `[0, 1)` from the top 53 bits of one draw.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One Bernoulli(p) draw. Consumes exactly one `next_u64`.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Unbiased uniform draw in `[0, bound)` by rejection sampling.
    #[inline]
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        // reject draws in the short final cycle so every residue is equally likely
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % bound;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    // Frozen outputs: the (seed -> outcome) map is a compatibility contract,
    // so any change to the state advance or output mix must fail here.
    #[test]
    fn stream_golden_values() {
        let mut r = SplitMix64::new(1);
        assert_eq!(r.next_u64(), 0x910A_2DEC_8902_5CC1);
        assert_eq!(r.next_u64(), 0xBEEB_8DA1_658E_EC67);
        assert_eq!(r.next_u64(), 0xF893_A2EE_FB32_555E);
    }

    #[test]
    fn next_f64_in_unit_interval() {
        let mut r = SplitMix64::new(7);
        for _ in 0..10_000 {
            let x = r.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn bernoulli_extremes() {
        let mut r = SplitMix64::new(9);
        for _ in 0..1000 {
            assert!(r.bernoulli(1.0));
            assert!(!r.bernoulli(0.0));
        }
    }

    #[test]
    fn next_below_covers_range() {
        let mut r = SplitMix64::new(3);
        let mut seen = [false; 7];
        for _ in 0..10_000 {
            let v = r.next_below(7) as usize;
            assert!(v < 7);
            seen[v] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn substream_seeds_distinct() {
        let mut seeds = std::collections::HashSet::new();
        for i in 0..10_000u64 {
            seeds.insert(substream_seed(123, i));
        }
        assert_eq!(seeds.len(), 10_000);
    }
}
