use nalgebra::{DMatrix, DVector};

use super::{CubicBilinearProblem, ProblemError};
use crate::oracle::{GroundTruth, SaddleOracle};
use crate::point::{JacobianValue, OperatorValue, Point, ProblemDims};

/// `f(x, y) = (ρ/6)|x|³ + y(ax - b)` on `ℝ × ℝ`, written out in scalars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarToyProblem {
    pub rho: f64,
    pub a: f64,
    pub b: f64,
}

impl ScalarToyProblem {
    /// # Panics
    /// If `a == 0`.
    pub fn new(rho: f64, a: f64, b: f64) -> Self {
        assert!(a != 0.0, "scalar toy needs a != 0");
        Self { rho, a, b }
    }

    /// The same function as a one-dimensional [`CubicBilinearProblem`].
    pub fn as_cubic_bilinear(&self) -> Result<CubicBilinearProblem, ProblemError> {
        CubicBilinearProblem::new(
            self.rho,
            DMatrix::from_element(1, 1, self.a),
            DVector::from_element(1, self.b),
        )
    }

    fn split(z: &Point) -> (f64, f64) {
        z.check_dims(ProblemDims::new(1, 1));
        (z.data()[0], z.data()[1])
    }
}

impl SaddleOracle for ScalarToyProblem {
    fn dims(&self) -> ProblemDims {
        ProblemDims::new(1, 1)
    }

    fn value(&self, z: &Point) -> f64 {
        let (x, y) = Self::split(z);
        self.rho / 6.0 * x.abs().powi(3) + y * (self.a * x - self.b)
    }

    fn operator(&self, z: &Point) -> OperatorValue {
        let (x, y) = Self::split(z);
        OperatorValue(DVector::from_vec(vec![
            0.5 * self.rho * x.abs() * x + self.a * y,
            -(self.a * x - self.b),
        ]))
    }

    fn jacobian(&self, z: &Point) -> JacobianValue {
        let (x, _) = Self::split(z);
        JacobianValue(DMatrix::from_row_slice(
            2,
            2,
            &[self.rho * x.abs(), self.a, -self.a, 0.0],
        ))
    }
}

impl GroundTruth for ScalarToyProblem {
    fn known_saddle(&self) -> Option<Point> {
        let x = self.b / self.a;
        let y = -0.5 * self.rho * x.abs() * x / self.a;
        Some(Point::from_parts(&[x], &[y]))
    }

    fn hessian_lipschitz(&self) -> Option<f64> {
        Some(self.rho)
    }
}

/// `f(x, y) = yᵀAx`: a linear operator with zero Hessian-Lipschitz constant.
#[derive(Debug, Clone)]
pub struct BilinearToyProblem {
    a: DMatrix<f64>,
}

impl BilinearToyProblem {
    /// # Panics
    /// If `a` is not square.
    pub fn new(a: DMatrix<f64>) -> Self {
        assert!(a.is_square() && a.nrows() > 0, "bilinear toy needs a nonempty square matrix");
        Self { a }
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
}

impl SaddleOracle for BilinearToyProblem {
    fn dims(&self) -> ProblemDims {
        ProblemDims::new(self.a.ncols(), self.a.nrows())
    }

    fn value(&self, z: &Point) -> f64 {
        z.check_dims(self.dims());
        z.y().dot(&(&self.a * z.x()))
    }

    fn operator(&self, z: &Point) -> OperatorValue {
        z.check_dims(self.dims());
        let dims = self.dims();
        let mut f = DVector::zeros(dims.total());
        f.rows_mut(0, dims.m).copy_from(&self.a.tr_mul(&z.y()));
        f.rows_mut(dims.m, dims.n).copy_from(&(-(&self.a * z.x())));
        OperatorValue(f)
    }

    fn jacobian(&self, z: &Point) -> JacobianValue {
        z.check_dims(self.dims());
        let dims = self.dims();
        let mut j = DMatrix::zeros(dims.total(), dims.total());
        j.view_mut((0, dims.m), (dims.m, dims.n)).copy_from(&self.a.transpose());
        j.view_mut((dims.m, 0), (dims.n, dims.m)).copy_from(&(-&self.a));
        JacobianValue(j)
    }
}

impl GroundTruth for BilinearToyProblem {
    fn known_saddle(&self) -> Option<Point> {
        let invertible = self.a.clone().lu().try_inverse().is_some();
        invertible.then(|| Point::zeros(self.dims()))
    }

    fn hessian_lipschitz(&self) -> Option<f64> {
        Some(0.0)
    }
}
