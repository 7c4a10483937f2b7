//! Deterministic random stream shared by every stochastic component.
//!
//! The stream is fully specified so that it can be reproduced outside Rust:
//!
//! * raw words come from xoshiro256++ whose 256-bit state is filled from the
//!   64-bit seed by four successive SplitMix64 outputs;
//! * `uniform()` takes the top 53 bits of a word and scales by 2^-53, giving
//!   a value in `[0, 1)`;
//! * `below(n)` rejects words from the biased tail of `u64` and reduces the
//!   rest modulo `n`;
//! * `normal()` uses the Marsaglia polar method on `2u - 1` pairs, returning
//!   the second deviate of each accepted pair on the following call.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

const F64_SCALE: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Clone, Debug)]
pub struct SeededRng {
    inner: Xoshiro256PlusPlus,
    spare_normal: Option<f64>,
}

/// Creates the stream for `seed`.
pub fn seeded_rng(seed: u64) -> SeededRng {
    SeededRng::new(seed)
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform real in `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * F64_SCALE
    }

    /// Uniform real in `[low, high)`.
    #[inline]
    pub fn uniform_in(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.uniform()
    }

    /// Uniform integer in `0..n`. Panics when `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0) has no valid output");
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return (v % n) as usize;
            }
        }
    }

    /// Standard normal deviate.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let factor = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * factor);
                return u * factor;
            }
        }
    }

    /// Cauchy deviate with the given location and scale.
    pub fn cauchy(&mut self, location: f64, scale: f64) -> f64 {
        location + scale * (std::f64::consts::PI * (self.uniform() - 0.5)).tan()
    }

    /// `k` distinct indices from `0..n`, none equal to any of `exclude`.
    pub fn distinct_indices(&mut self, n: usize, k: usize, exclude: &[usize]) -> Vec<usize> {
        let mut picked = Vec::with_capacity(k);
        assert!(
            n >= k + exclude.len(),
            "cannot draw {k} distinct indices from {n}"
        );
        while picked.len() < k {
            let r = self.below(n);
            if !exclude.contains(&r) && !picked.contains(&r) {
                picked.push(r);
            }
        }
        picked
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = seeded_rng(42);
        let mut b = seeded_rng(42);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        for _ in 0..1000 {
            assert_eq!(a.normal().to_bits(), b.normal().to_bits());
        }
    }

    #[test]
    fn neighbouring_seeds_differ_early() {
        let mut a = seeded_rng(42);
        let mut b = seeded_rng(43);
        let differs = (0..10).any(|_| a.next_u64() != b.next_u64());
        assert!(differs);
    }

    #[test]
    fn uniform_mean_near_half() {
        let mut rng = seeded_rng(7);
        let n = 1_000_000;
        let mean = (0..n).map(|_| rng.uniform()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.002, "mean {mean}");
    }

    #[test]
    fn uniform_stays_in_unit_interval() {
        let mut rng = seeded_rng(1);
        for _ in 0..100_000 {
            let u = rng.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn normal_moments() {
        let mut rng = seeded_rng(99);
        let n = 200_000;
        let draws: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn below_covers_range_without_bias() {
        let mut rng = seeded_rng(3);
        let mut counts = [0usize; 6];
        for _ in 0..60_000 {
            counts[rng.below(6)] += 1;
        }
        for c in counts {
            assert!((9_400..10_600).contains(&c), "{counts:?}");
        }
    }

    #[test]
    fn distinct_indices_respect_exclusion() {
        let mut rng = seeded_rng(5);
        for _ in 0..1000 {
            let idx = rng.distinct_indices(6, 3, &[2]);
            assert_eq!(idx.len(), 3);
            assert!(!idx.contains(&2));
            assert!(idx[0] != idx[1] && idx[1] != idx[2] && idx[0] != idx[2]);
        }
    }
}
