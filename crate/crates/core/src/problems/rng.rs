//! Seeded random data for benchmark instances.
//!
//! Everything is drawn from ChaCha20 seeded with `seed_from_u64(seed)`. Each
//! consumer owns a fixed stream id, so the vector `b` and the initial
//! perturbation `c` are independent for the same seed and neither depends on
//! how much the other consumed. Floats are built from the top 53 bits of each
//! `u64` word, which keeps the output identical across platforms and across
//! `rand` versions.

use nalgebra::DVector;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Stream used for the right-hand side `b` of the cubic-bilinear problem.
pub const STREAM_B: u64 = 1;
/// Stream used for the initial-point perturbation `c`.
pub const STREAM_INIT: u64 = 2;
/// Stream used for randomly generated test matrices.
pub const STREAM_MATRIX: u64 = 3;

pub fn generator(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform on `[0, 1)` with 53 random bits.
pub fn unit_interval(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `len` iid draws, uniform on `[-1, 1)`.
pub fn uniform_symmetric(seed: u64, stream: u64, len: usize) -> DVector<f64> {
    let mut rng = generator(seed, stream);
    DVector::from_fn(len, |_, _| 2.0 * unit_interval(&mut rng) - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_independent_and_reproducible() {
        let b = uniform_symmetric(7, STREAM_B, 50);
        let c = uniform_symmetric(7, STREAM_INIT, 50);
        assert_ne!(b, c);
        let again = uniform_symmetric(7, STREAM_B, 50);
        assert!(b.iter().zip(again.iter()).all(|(u, v)| u.to_bits() == v.to_bits()));
        // a shorter draw is a prefix of a longer one
        let short = uniform_symmetric(7, STREAM_B, 10);
        assert_eq!(short.as_slice(), &b.as_slice()[..10]);
    }

    #[test]
    fn draws_stay_in_range() {
        let v = uniform_symmetric(1, STREAM_B, 10_000);
        assert!(v.iter().all(|&x| (-1.0..1.0).contains(&x)));
        let mean = v.sum() / v.len() as f64;
        assert!(mean.abs() < 0.05);
    }
}
