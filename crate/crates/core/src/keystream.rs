//! Deterministic counter-mode uniform streams.
//!
//! Every random draw in the crate (obfuscation patterns, channel noise,
//! synthetic devices, per-trial seeds) comes from a [`CounterStream`]: a
//! 64-bit seed plus a block counter, each output being an avalanche mix of
//! `seed + counter * GAMMA`. Streams are cheap to construct, so callers derive
//! a fresh one per (key, index) or per (root seed, trial) instead of sharing
//! mutable generator state.
//!
//! Nothing here is cryptographically strong. The obfuscation scheme relies on
//! key secrecy, not on the generator resisting cryptanalysis.

use std::f64::consts::TAU;

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer: full avalanche over 64 bits.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent child seed from `root` and an index.
///
/// Used for per-trial seeds so results do not depend on execution order.
#[inline]
pub fn derive_seed(root: u64, index: u64) -> u64 {
    mix64(root ^ mix64(index.wrapping_add(GAMMA)).rotate_left(17))
}

/// Source of i.i.d. uniform draws in `[0, 1)`.
pub trait UniformSource {
    fn next_u64(&mut self) -> u64;

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    #[inline]
    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in the open interval `(0, 1)`.
    #[inline]
    fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Pair of independent standard normals (Box-Muller).
    #[inline]
    fn next_normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_open01();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        (r * c, r * s)
    }
}

#[derive(Debug, Clone)]
pub struct CounterStream {
    seed: u64,
    counter: u64,
}

impl CounterStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    /// Stream keyed by a 128-bit key, a 32-bit index and a domain tag.
    ///
    /// The domain tag separates independent uses of the same key (per-frame
    /// jitter vs. per-session subcarrier means).
    pub fn keyed(key: u128, index: u64, domain: u64) -> Self {
        let lo = key as u64;
        let hi = (key >> 64) as u64;
        let s = mix64(lo ^ mix64(hi ^ mix64(domain.wrapping_mul(GAMMA) ^ 0x5246_5665_696c)));
        Self::new(mix64(s ^ index.wrapping_mul(0xd6e8_feb8_6659_fd93)))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl UniformSource for CounterStream {
    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.seed.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }
}
