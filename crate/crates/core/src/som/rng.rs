//! Seeded randomness for weight initialisation, shuffling and sampling.
//!
//! The generator is PCG-XSL-RR 128/64 (`rand_pcg::Pcg64`): 128-bit LCG state
//! with multiplier `0x2360ED051FC65DA44385DF649FCCF645`, output by an
//! xor of the state halves and a state-dependent rotation. It is seeded with
//! `SeedableRng::seed_from_u64`, which expands the 64-bit seed through PCG32
//! into both the initial state and the (odd) increment. Conversions below are fixed here,
//! not delegated to `rand`, so streams do not move with crate upgrades.

use rand_core::{RngCore, SeedableRng};
use rand_pcg::Pcg64;

pub struct SeededRng(Pcg64);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(Pcg64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in [0, 1): the top 53 bits scaled by 2⁻⁵³.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Integer in [0, n) by 128-bit multiply-shift (Lemire, without rejection).
    pub fn below(&mut self, n: usize) -> usize {
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Fisher–Yates, walking from the back.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i + 1);
            xs.swap(i, j);
        }
    }
}
