//! Seedable, portable random number generation.
//!
//! All Monte Carlo machinery in this crate draws from xoshiro256++ seeded
//! through splitmix64, following the reference implementations by Blackman
//! and Vigna. Both algorithms are pure integer arithmetic, so every sequence
//! is bit-identical across platforms and toolchains. Independent trials take
//! sub-seeds from the splitmix64 output stream of a master seed
//! ([`derive_seed`]), never from a shared generator, which keeps parallel or
//! reordered execution deterministic.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The `stream`-th output of a splitmix64 generator seeded with `seed`.
///
/// Used to derive independent per-trial (or per-histogram) seeds from one
/// master seed in O(1), independent of evaluation order.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64_mix(seed.wrapping_add(GOLDEN.wrapping_mul(stream.wrapping_add(1))))
}

/// xoshiro256++ generator.
#[derive(Debug, Clone)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    /// Seed the full 256-bit state from `seed` via splitmix64.
    pub fn new(seed: u64) -> Self {
        let mut state = seed;
        let mut s = [0u64; 4];
        for slot in &mut s {
            state = state.wrapping_add(GOLDEN);
            *slot = splitmix64_mix(state);
        }
        Rng { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0]
            .wrapping_add(s[3])
            .rotate_left(23)
            .wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform f64 in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in [lo, hi] (inclusive), by rejection-free scaling.
    pub fn uniform_i64(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi - lo) as u64 + 1;
        lo + (self.next_f64() * span as f64) as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        let mut a = Rng::new(42);
        let mut b = Rng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn seeds_differ() {
        let mut a = Rng::new(1);
        let mut b = Rng::new(2);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn unit_interval() {
        let mut rng = Rng::new(7);
        for _ in 0..10_000 {
            let u = rng.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn derived_seeds_are_order_free() {
        let s3 = derive_seed(99, 3);
        let s0 = derive_seed(99, 0);
        assert_eq!(s3, derive_seed(99, 3));
        assert_ne!(s0, s3);
    }

    #[test]
    fn uniform_mean_is_sane() {
        let mut rng = Rng::new(123);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| rng.next_f64()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.005);
    }
}
