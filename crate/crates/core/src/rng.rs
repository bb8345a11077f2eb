//! Seeded randomness with a fixed, platform-independent draw contract.
//!
//! The raw stream is ChaCha8 keyed from the 64-bit seed through SplitMix64
//! (four outputs form the 256-bit key). All derived draws are defined here
//! rather than delegated to `rand`'s distribution code, so sample streams do
//! not change when upstream sampling algorithms change:
//!
//! * `unit()` is `(next_u64 >> 11) * 2^-53`, uniform on `[0, 1)`.
//! * `int_inclusive(lo, hi)` uses Lemire's widening multiply with rejection.
//! * sub-seeds are `splitmix64(seed + (index + 1) * 0x9E3779B97F4A7C15)`,
//!   which is injective in `index` because the finalizer is a bijection.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Identifier recorded in manifests; bump when any draw semantics change.
pub const RNG_ALGORITHM: &str = "chacha8-splitmix64-v1";

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer. Bijective on `u64`.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of stream `index` from `seed`.
pub fn mix(seed: u64, index: u64) -> u64 {
    splitmix64(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Named sub-streams of one sample. Each pipeline stage draws from its own
/// stream so enabling or disabling a stage never shifts another stage's draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Variables = 1,
    Background = 2,
    Straylight = 3,
    Dust = 4,
    Vignetting = 5,
    Blur = 6,
    Sensor = 7,
    BrokenPixels = 8,
    BrokenLines = 9,
    Matrix = 10,
}

#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        let mut state = seed;
        for chunk in key.chunks_exact_mut(8) {
            state = state.wrapping_add(GOLDEN_GAMMA);
            chunk.copy_from_slice(&splitmix64(state).to_le_bytes());
        }
        Self {
            seed,
            inner: ChaCha8Rng::from_seed(key),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// A fresh generator for sub-stream `index` of this generator's seed.
    /// Independent of how many draws were already taken.
    pub fn derive(&self, index: u64) -> SeededRng {
        SeededRng::new(mix(self.seed, index))
    }

    pub fn stream(&self, stream: Stream) -> SeededRng {
        self.derive(stream as u64)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform on the open interval `(lo, hi)`.
    pub fn open_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        loop {
            let x = self.uniform(lo, hi);
            if x > lo && x < hi {
                return x;
            }
        }
    }

    /// Uniform on the closed interval `[lo, hi]` (endpoint mass is zero in practice).
    pub fn closed_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.uniform(lo, hi).clamp(lo, hi)
    }

    /// Uniform integer in `[0, n)`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn int_inclusive(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "empty integer range [{lo}, {hi}]");
        let span = (hi - lo) as u64;
        if span == u64::MAX {
            return self.next_u64() as i64;
        }
        lo + self.below(span + 1) as i64
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// `k` distinct values from `[0, n)`, in draw order.
    pub fn distinct(&mut self, n: u64, k: usize) -> Vec<u64> {
        assert!(k as u64 <= n, "cannot draw {k} distinct values from {n}");
        // Floyd's algorithm keeps memory proportional to k.
        let mut chosen = std::collections::BTreeSet::new();
        let mut order = Vec::with_capacity(k);
        for j in (n - k as u64)..n {
            let t = self.below(j + 1);
            let pick = if chosen.contains(&t) { j } else { t };
            chosen.insert(pick);
            order.push(pick);
        }
        order
    }

    pub fn choose<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len() as u64) as usize]
    }
}
