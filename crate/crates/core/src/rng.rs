//! Deterministic pseudo-random numbers.
//!
//! Every stochastic step in this crate (corpus sampling, vector
//! initialization, dynamic window draws, noise sampling) goes through
//! [`SplitMix64`], so a fixed seed reproduces a run bit for bit on any
//! platform. SplitMix64 is the mixer published by Steele, Lea and Flood in
//! "Fast Splittable Pseudorandom Number Generators" (OOPSLA 2014); it is a
//! 64-bit shift/multiply/xor generator with a full 2^64 period over its
//! counter. The algorithm is fixed for the lifetime of this repository:
//! changing it would silently change every sampled corpus and every trained
//! model.

/// SplitMix64 generator. State advances by the golden-gamma constant and the
/// output is a finalizing mix of the new state.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform f64 in [0, 1), using the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform f64 in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in [0, n). Lemire's multiply-shift reduction; the
    /// modulo bias is below 2^-64 per draw, irrelevant at our scales, and the
    /// mapping is exactly reproducible.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }
}
