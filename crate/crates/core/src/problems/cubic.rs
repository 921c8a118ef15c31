use nalgebra::{DMatrix, DVector};

use super::rng;
use super::ProblemError;
use crate::oracle::{GroundTruth, SaddleOracle};
use crate::point::{JacobianValue, OperatorValue, Point, ProblemDims};

/// `f(x, y) = (ρ/6)‖x‖³ + yᵀ(Ax - b)` with `x, y ∈ ℝⁿ` and `A` invertible.
///
/// The saddle point is `x* = A⁻¹b`, `y* = -(ρ/2)‖x*‖ A⁻ᵀx*`, and `f` is
/// `ρ`-Hessian-Lipschitz.
#[derive(Debug, Clone)]
pub struct CubicBilinearProblem {
    rho: f64,
    a: DMatrix<f64>,
    b: DVector<f64>,
    b_seed: Option<u64>,
    saddle: Point,
}

/// Where the right-hand side `b` comes from.
#[derive(Debug, Clone)]
pub enum BSource {
    /// iid uniform on `[-1, 1)` from the `b` stream of this seed.
    Seed(u64),
    Vector(DVector<f64>),
}

/// Builds the benchmark instance with `n × n` matrix `a`.
pub fn make_cubic_bilinear(
    n: usize,
    rho: f64,
    a: DMatrix<f64>,
    b: BSource,
) -> Result<CubicBilinearProblem, ProblemError> {
    if a.nrows() != n || a.ncols() != n {
        return Err(ProblemError::DimensionMismatch(format!(
            "A is {}x{}, expected {n}x{n}",
            a.nrows(),
            a.ncols()
        )));
    }
    match b {
        BSource::Seed(seed) => {
            let b = rng::uniform_symmetric(seed, rng::STREAM_B, n);
            let mut p = CubicBilinearProblem::new(rho, a, b)?;
            p.b_seed = Some(seed);
            Ok(p)
        }
        BSource::Vector(b) => CubicBilinearProblem::new(rho, a, b),
    }
}

impl CubicBilinearProblem {
    pub fn new(rho: f64, a: DMatrix<f64>, b: DVector<f64>) -> Result<Self, ProblemError> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(ProblemError::InvalidParameter {
                name: "rho",
                reason: format!("must be positive and finite, got {rho}"),
            });
        }
        let n = b.len();
        if n == 0 || a.nrows() != n || a.ncols() != n {
            return Err(ProblemError::DimensionMismatch(format!(
                "A is {}x{} but b has length {n}",
                a.nrows(),
                a.ncols()
            )));
        }
        let lu = a.clone().lu();
        let u = lu.u();
        let scale = u.amax();
        if scale == 0.0 || u.diagonal().iter().any(|d| d.abs() <= 1e-14 * scale) {
            return Err(ProblemError::SingularMatrix);
        }
        let x_star = lu.solve(&b).ok_or(ProblemError::SingularMatrix)?;
        let at_lu = a.transpose().lu();
        let y_star = at_lu.solve(&x_star).ok_or(ProblemError::SingularMatrix)? * (-0.5 * rho * x_star.norm());
        let saddle = Point::from_parts(x_star.as_slice(), y_star.as_slice());
        Ok(Self {
            rho,
            a,
            b,
            b_seed: None,
            saddle,
        })
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    /// Seed that generated `b`, when it was drawn rather than supplied.
    pub fn b_seed(&self) -> Option<u64> {
        self.b_seed
    }

    pub(crate) fn with_b_seed(mut self, seed: Option<u64>) -> Self {
        self.b_seed = seed;
        self
    }

    pub fn saddle(&self) -> &Point {
        &self.saddle
    }
}

impl SaddleOracle for CubicBilinearProblem {
    fn dims(&self) -> ProblemDims {
        ProblemDims::new(self.n(), self.n())
    }

    fn value(&self, z: &Point) -> f64 {
        z.check_dims(self.dims());
        let x = z.x();
        let r = &self.a * x - &self.b;
        self.rho / 6.0 * x.norm().powi(3) + z.y().dot(&r)
    }

    fn operator(&self, z: &Point) -> OperatorValue {
        z.check_dims(self.dims());
        let n = self.n();
        let x = z.x();
        let y = z.y();
        let mut f = DVector::zeros(2 * n);
        let gx = x * (0.5 * self.rho * x.norm()) + self.a.tr_mul(&y);
        let gy = &self.b - &self.a * x;
        f.rows_mut(0, n).copy_from(&gx);
        f.rows_mut(n, n).copy_from(&gy);
        OperatorValue(f)
    }

    fn jacobian(&self, z: &Point) -> JacobianValue {
        z.check_dims(self.dims());
        let n = self.n();
        let x = z.x();
        let nx = x.norm();
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        // The Hessian of (ρ/6)‖x‖³ is (ρ/2)(‖x‖I + xxᵀ/‖x‖); its limit at x = 0 is 0.
        if nx > 0.0 {
            let mut hxx = x * x.transpose() * (0.5 * self.rho / nx);
            for i in 0..n {
                hxx[(i, i)] += 0.5 * self.rho * nx;
            }
            j.view_mut((0, 0), (n, n)).copy_from(&hxx);
        }
        j.view_mut((0, n), (n, n)).copy_from(&self.a.transpose());
        j.view_mut((n, 0), (n, n)).copy_from(&(-&self.a));
        JacobianValue(j)
    }
}

impl GroundTruth for CubicBilinearProblem {
    fn known_saddle(&self) -> Option<Point> {
        Some(self.saddle.clone())
    }

    fn hessian_lipschitz(&self) -> Option<f64> {
        Some(self.rho)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_matrix_is_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let err = make_cubic_bilinear(2, 1.0, a, BSource::Seed(0)).unwrap_err();
        assert!(matches!(err, ProblemError::SingularMatrix));
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let err = make_cubic_bilinear(3, 1.0, DMatrix::identity(2, 2), BSource::Seed(0)).unwrap_err();
        assert!(matches!(err, ProblemError::DimensionMismatch(_)));
    }

    #[test]
    fn operator_vanishes_at_saddle() {
        let p = make_cubic_bilinear(50, 10.0, DMatrix::identity(50, 50), BSource::Seed(7)).unwrap();
        let g = p.operator(p.saddle());
        assert!(g.norm() <= 1e-10 * (1.0 + p.b().norm()), "{}", g.norm());
    }

    #[test]
    fn zero_b_puts_saddle_at_origin() {
        let p = make_cubic_bilinear(4, 2.0, DMatrix::identity(4, 4), BSource::Vector(DVector::zeros(4))).unwrap();
        assert_eq!(p.saddle().norm(), 0.0);
    }

    #[test]
    fn seeded_b_is_bit_reproducible() {
        let a = make_cubic_bilinear(20, 10.0, DMatrix::identity(20, 20), BSource::Seed(42)).unwrap();
        let b = make_cubic_bilinear(20, 10.0, DMatrix::identity(20, 20), BSource::Seed(42)).unwrap();
        assert!(a.b().iter().zip(b.b().iter()).all(|(u, v)| u.to_bits() == v.to_bits()));
        assert!(a.b().iter().all(|v| (-1.0..1.0).contains(v)));
        assert_eq!(a.b_seed(), Some(42));
    }

    #[test]
    fn operator_at_origin_is_zero_then_b() {
        let b = DVector::from_vec(vec![0.25, -0.5, 1.0]);
        let p = make_cubic_bilinear(3, 5.0, DMatrix::identity(3, 3), BSource::Vector(b.clone())).unwrap();
        let g = p.operator(&Point::zeros(p.dims()));
        assert_eq!(g.0.rows(0, 3).iter().copied().collect::<Vec<_>>(), vec![0.0; 3]);
        assert_eq!(g.0.rows(3, 3).clone_owned(), b);
        assert_eq!(g.norm(), b.norm());
    }

    #[test]
    fn jacobian_blocks() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -1.0, 3.0]);
        let p = CubicBilinearProblem::new(4.0, a.clone(), DVector::from_vec(vec![1.0, 0.0])).unwrap();
        let z = Point::from_parts(&[3.0, 4.0], &[1.0, 1.0]);
        let j = p.jacobian(&z).0;
        // (ρ/2)(‖x‖I + xxᵀ/‖x‖) with ‖x‖ = 5
        let expected_xx = DMatrix::from_row_slice(2, 2, &[2.0 * (5.0 + 9.0 / 5.0), 2.0 * 12.0 / 5.0, 2.0 * 12.0 / 5.0, 2.0 * (5.0 + 16.0 / 5.0)]);
        assert!((j.view((0, 0), (2, 2)) - expected_xx).norm() < 1e-12);
        assert_eq!(j.view((0, 2), (2, 2)).clone_owned(), a.transpose());
        assert_eq!(j.view((2, 0), (2, 2)).clone_owned(), -a);
        assert_eq!(j.view((2, 2), (2, 2)).norm(), 0.0);
    }

    #[test]
    fn value_is_defined_at_zero_primal() {
        let p = make_cubic_bilinear(2, 3.0, DMatrix::identity(2, 2), BSource::Vector(DVector::from_vec(vec![1.0, 1.0]))).unwrap();
        let z = Point::from_parts(&[0.0, 0.0], &[2.0, -1.0]);
        assert_eq!(p.value(&z), -1.0);
        assert_eq!(p.jacobian(&z).0.view((0, 0), (2, 2)).norm(), 0.0);
    }
}
