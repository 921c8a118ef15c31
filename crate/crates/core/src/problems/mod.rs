//! Benchmark problems with ground-truth metadata.

mod cubic;
mod gap;
mod instance;
pub mod rng;
mod toys;

use thiserror::Error;

pub use cubic::{make_cubic_bilinear, BSource, CubicBilinearProblem};
pub use gap::{default_beta, restricted_gap, GapQuery, GapReport};
pub use instance::{read_instance, write_instance};
pub use toys::{BilinearToyProblem, ScalarToyProblem};

use crate::oracle::GroundTruth;
use crate::point::Point;
use nalgebra::DVector;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("matrix A is singular or numerically singular")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("instance file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `z* + 0.1·c` with each entry of `c` uniform on `[-1, 1)`, drawn from the
/// perturbation stream of `seed`.
///
/// # Panics
/// If the problem has no known saddle point.
pub fn initial_point<P: GroundTruth + ?Sized>(problem: &P, seed: u64) -> Point {
    let z_star = problem
        .known_saddle()
        .expect("initial_point requires a known saddle point");
    let c = rng::uniform_symmetric(seed, rng::STREAM_INIT, z_star.dims().total());
    perturbed_point(&z_star, &c)
}

/// `z* + 0.1·c` for an explicit perturbation direction `c`.
pub fn perturbed_point(z_star: &Point, c: &DVector<f64>) -> Point {
    z_star.offset(&(c * 0.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn problem() -> CubicBilinearProblem {
        make_cubic_bilinear(5, 10.0, DMatrix::identity(5, 5), BSource::Seed(3)).unwrap()
    }

    #[test]
    fn zero_perturbation_gives_saddle() {
        let p = problem();
        let z_star = p.known_saddle().unwrap();
        let z0 = perturbed_point(&z_star, &DVector::zeros(10));
        assert_eq!(z0, z_star);
    }

    #[test]
    fn initial_point_is_within_component_bound() {
        let p = problem();
        let z_star = p.known_saddle().unwrap();
        for seed in 0..20 {
            let z0 = initial_point(&p, seed);
            assert!(z0.distance(&z_star) <= 0.1 * (10f64).sqrt());
        }
    }

    #[test]
    fn initial_point_is_deterministic() {
        let p = problem();
        let a = initial_point(&p, 11);
        let b = initial_point(&p, 11);
        assert!(a
            .data()
            .iter()
            .zip(b.data().iter())
            .all(|(u, v)| u.to_bits() == v.to_bits()));
        assert_ne!(a, initial_point(&p, 12));
    }
}
