//! Joint primal-dual vectors and the operator/Jacobian value types.

use nalgebra::{DMatrix, DVector, DVectorView};

/// Primal dimension `m` and dual dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProblemDims {
    pub m: usize,
    pub n: usize,
}

impl ProblemDims {
    pub fn new(m: usize, n: usize) -> Self {
        assert!(m >= 1 && n >= 1, "dimensions must be positive (got m={m}, n={n})");
        Self { m, n }
    }

    /// Joint dimension `d = m + n`.
    pub fn total(&self) -> usize {
        self.m + self.n
    }
}

/// A joint point `z = [x; y]`. The first `m` entries are primal, the last `n` dual.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    data: DVector<f64>,
    dims: ProblemDims,
}

impl Point {
    pub fn new(data: DVector<f64>, dims: ProblemDims) -> Self {
        assert_eq!(
            data.len(),
            dims.total(),
            "point length {} does not match m + n = {}",
            data.len(),
            dims.total()
        );
        Self { data, dims }
    }

    pub fn from_parts(x: &[f64], y: &[f64]) -> Self {
        let dims = ProblemDims::new(x.len(), y.len());
        let data = DVector::from_iterator(dims.total(), x.iter().chain(y).copied());
        Self { data, dims }
    }

    pub fn zeros(dims: ProblemDims) -> Self {
        Self::new(DVector::zeros(dims.total()), dims)
    }

    pub fn dims(&self) -> ProblemDims {
        self.dims
    }

    pub fn data(&self) -> &DVector<f64> {
        &self.data
    }

    pub fn into_data(self) -> DVector<f64> {
        self.data
    }

    pub fn x(&self) -> DVectorView<'_, f64> {
        self.data.rows(0, self.dims.m)
    }

    pub fn y(&self) -> DVectorView<'_, f64> {
        self.data.rows(self.dims.m, self.dims.n)
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.check_dims(other.dims);
        (&self.data - &other.data).norm()
    }

    /// `self + step`.
    pub fn offset(&self, step: &DVector<f64>) -> Point {
        Point::new(&self.data + step, self.dims)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub(crate) fn check_dims(&self, dims: ProblemDims) {
        assert_eq!(self.dims, dims, "dimension mismatch");
    }
}

/// Value of the operator `F(z) = [∇_x f; -∇_y f]`.
///
/// The sign flip on the dual block preserves the norm, so `‖F(z)‖ = ‖∇f(z)‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorValue(pub DVector<f64>);

impl OperatorValue {
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// The gradient of `f` implied by this operator value, `[F_x; -F_y]`.
    pub fn gradient(&self, dims: ProblemDims) -> DVector<f64> {
        let mut g = self.0.clone();
        g.rows_mut(dims.m, dims.n).neg_mut();
        g
    }
}

/// Dense Jacobian `DF(z)` of the operator, shape `(m + n) × (m + n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianValue(pub DMatrix<f64>);

impl JacobianValue {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Frobenius norm. Used as a cheap scale estimate.
    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(&self.0)
    }

    /// Smallest eigenvalue of the symmetric part `(J + Jᵀ)/2`.
    pub fn min_symmetric_eigenvalue(&self) -> f64 {
        let sym = (&self.0 + self.0.transpose()) * 0.5;
        sym.symmetric_eigenvalues().min()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

pub(crate) fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slices_split_primal_and_dual() {
        let z = Point::from_parts(&[1.0, 2.0], &[3.0]);
        assert_eq!(z.dims(), ProblemDims::new(2, 1));
        assert_eq!(z.x().as_slice(), &[1.0, 2.0]);
        assert_eq!(z.y().as_slice(), &[3.0]);
    }

    #[test]
    #[should_panic(expected = "does not match")]
    fn rejects_wrong_length() {
        Point::new(DVector::zeros(3), ProblemDims::new(1, 1));
    }

    #[test]
    fn gradient_flips_dual_block_and_keeps_norm() {
        let dims = ProblemDims::new(1, 2);
        let f = OperatorValue(DVector::from_vec(vec![1.0, -2.0, 3.0]));
        let g = f.gradient(dims);
        assert_eq!(g.as_slice(), &[1.0, 2.0, -3.0]);
        assert_eq!(g.norm(), f.norm());
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let j = JacobianValue(DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -5.0])));
        assert!((j.spectral_norm() - 5.0).abs() < 1e-12);
    }
}
