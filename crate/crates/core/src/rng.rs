//! Seeded randomness for protocol runs and graph sampling.
//!
//! The stream is ChaCha8 (`rand_chacha` 0.3) seeded through `SeedableRng::seed_from_u64`.
//! Everything drawn from it goes through the helpers below, whose algorithms are fixed:
//!
//! * `below(n)`: one `u64` per attempt, rejecting draws under `2^64 mod n`, result `x mod n`.
//! * `bit()`: consumes a fresh `u64` every 64 bits, least significant bit first.
//! * `bernoulli(p/q)`: compares a lazily generated uniform binary fraction against the
//!   binary expansion of `p/q`; exact for any rational.
//! * `shuffle`: Fisher-Yates from the last position down, swapping with `below(i + 1)`.
//!
//! Identical seeds therefore give identical runs on every platform.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub const RNG_ALGORITHM: &str = "chacha8-seed_from_u64/v1";

#[derive(Clone, Debug)]
pub struct ProtocolRng {
    inner: ChaCha8Rng,
    bits: u64,
    bits_left: u32,
}

impl ProtocolRng {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
            bits: 0,
            bits_left: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn bit(&mut self) -> bool {
        if self.bits_left == 0 {
            self.bits = self.inner.next_u64();
            self.bits_left = 64;
        }
        let b = self.bits & 1 == 1;
        self.bits >>= 1;
        self.bits_left -= 1;
        b
    }

    /// Uniform in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let threshold = n.wrapping_neg() % n;
        loop {
            let x = self.inner.next_u64();
            if x >= threshold {
                return x % n;
            }
        }
    }

    /// Returns true with probability exactly `p` (clamped to `[0, 1]`).
    pub fn bernoulli(&mut self, p: &BigRational) -> bool {
        if !p.is_positive() {
            return false;
        }
        if *p >= BigRational::one() {
            return true;
        }
        let den = p.denom().clone();
        let mut rem: BigInt = p.numer().clone();
        // Walk the binary expansions of p and of a uniform U side by side; the first
        // differing digit decides U < p.
        loop {
            rem <<= 1;
            let p_bit = rem >= den;
            if p_bit {
                rem -= &den;
            }
            let u_bit = self.bit();
            if u_bit != p_bit {
                return p_bit;
            }
            if rem.is_zero() {
                // remaining digits of p are all zero, U's cannot all be zero a.s.
                return false;
            }
        }
    }

    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }

    /// Splits `pool` into a uniformly random `k`-subset and the rest, both sorted.
    pub fn split_subset(&mut self, pool: &[usize], k: usize) -> (Vec<usize>, Vec<usize>) {
        assert!(k <= pool.len());
        let mut v = pool.to_vec();
        for i in 0..k {
            let j = i + self.below((v.len() - i) as u64) as usize;
            v.swap(i, j);
        }
        let mut rest = v.split_off(k);
        v.sort_unstable();
        rest.sort_unstable();
        (v, rest)
    }
}
