//! Seeded random function ensembles.
//!
//! Every ensemble draws from Xoshiro256++ seeded through SplitMix64
//! (`Xoshiro256PlusPlus::seed_from_u64`), so a seed fixes the ensemble on any platform.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::function::FunctionRep;
use crate::grid::Interval;

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

pub type EnsembleRng = Xoshiro256PlusPlus;

/// An independent stream per suite, so adding draws to one suite never shifts another.
pub fn stream(seed: u64, suite: u64) -> EnsembleRng {
    Xoshiro256PlusPlus::seed_from_u64(seed ^ suite.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// `u_k / (k+1)^decay` with `u_k` uniform on `[-1, 1]`.
pub fn coefficients(rng: &mut EnsembleRng, len: usize, decay: f64) -> Vec<f64> {
    (0..len).map(|k| rng.random_range(-1.0..=1.0) / ((k + 1) as f64).powf(decay)).collect()
}

pub fn sine_series(rng: &mut EnsembleRng, domain: Interval, max_modes: usize) -> FunctionRep {
    let modes = rng.random_range(1..=max_modes);
    FunctionRep::sine(domain, coefficients(rng, modes, 0.0))
}

pub fn legendre_series(rng: &mut EnsembleRng, domain: Interval, max_len: usize, decay: f64) -> FunctionRep {
    let len = rng.random_range(1..=max_len);
    FunctionRep::legendre(domain, coefficients(rng, len, decay))
}

/// `p(x) e^{-σx}` with `deg p ≤ 3` and `σ ∈ [0.5, 3]` on `domain = [0, s_max]`.
pub fn poly_exp(rng: &mut EnsembleRng, domain: Interval) -> FunctionRep {
    let degree = rng.random_range(0..=3);
    let rate = rng.random_range(0.5..=3.0);
    FunctionRep::PolyExp { domain, coefficients: coefficients(rng, degree + 1, 0.0), rate }
}

/// An interval with left end in `[-2, 2]` and length in `[0.2, 3]`.
pub fn interval(rng: &mut EnsembleRng) -> Interval {
    let a = rng.random_range(-2.0..=2.0);
    let len = rng.random_range(0.2..=3.0);
    Interval::new(a, a + len).expect("positive length")
}

pub fn count(rng: &mut EnsembleRng, lo: usize, hi: usize) -> usize {
    rng.random_range(lo..=hi)
}

pub fn uniform(rng: &mut EnsembleRng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..=hi)
}
