//! The problem oracle contract and wrappers around it.

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DMatrix;

use crate::point::{JacobianValue, OperatorValue, Point, ProblemDims};

/// Evaluation contract for a convex-concave saddle function `f(x, y)`.
///
/// `operator` returns `F(z) = [∇_x f; -∇_y f]` and `jacobian` its derivative
/// `DF(z)`. Implementations must be pure functions of `z` so that they can be
/// evaluated concurrently on shared data.
///
/// Solvers only ever see this trait. Ground truth used by tests lives in
/// [`GroundTruth`] and is deliberately not reachable from a `SaddleOracle`.
pub trait SaddleOracle {
    fn dims(&self) -> ProblemDims;
    fn value(&self, z: &Point) -> f64;
    fn operator(&self, z: &Point) -> OperatorValue;
    fn jacobian(&self, z: &Point) -> JacobianValue;
}

/// Test-only metadata: a known saddle point and the Hessian-Lipschitz constant.
pub trait GroundTruth {
    fn known_saddle(&self) -> Option<Point>;
    fn hessian_lipschitz(&self) -> Option<f64>;
}

impl<O: SaddleOracle + ?Sized> SaddleOracle for &O {
    fn dims(&self) -> ProblemDims {
        (**self).dims()
    }
    fn value(&self, z: &Point) -> f64 {
        (**self).value(z)
    }
    fn operator(&self, z: &Point) -> OperatorValue {
        (**self).operator(z)
    }
    fn jacobian(&self, z: &Point) -> JacobianValue {
        (**self).jacobian(z)
    }
}

/// `‖F(z)‖`, which equals `‖∇f(z)‖`.
pub fn grad_norm<O: SaddleOracle + ?Sized>(oracle: &O, z: &Point) -> f64 {
    oracle.operator(z).norm()
}

/// Snapshot of evaluation counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCounts {
    pub operator: u64,
    pub jacobian: u64,
    pub linear_solves: u64,
}

/// Wraps an oracle and counts operator and Jacobian evaluations.
///
/// Linear solves are not oracle calls; solvers report them through
/// [`CountedOracle::add_linear_solves`] so one snapshot carries all three.
#[derive(Debug)]
pub struct CountedOracle<O> {
    inner: O,
    operator: AtomicU64,
    jacobian: AtomicU64,
    linear_solves: AtomicU64,
}

impl<O: SaddleOracle> CountedOracle<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            operator: AtomicU64::new(0),
            jacobian: AtomicU64::new(0),
            linear_solves: AtomicU64::new(0),
        }
    }

    pub fn counts(&self) -> EvalCounts {
        EvalCounts {
            operator: self.operator.load(Ordering::Relaxed),
            jacobian: self.jacobian.load(Ordering::Relaxed),
            linear_solves: self.linear_solves.load(Ordering::Relaxed),
        }
    }

    pub fn add_linear_solves(&self, n: u64) {
        self.linear_solves.fetch_add(n, Ordering::Relaxed);
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: SaddleOracle> SaddleOracle for CountedOracle<O> {
    fn dims(&self) -> ProblemDims {
        self.inner.dims()
    }
    fn value(&self, z: &Point) -> f64 {
        self.inner.value(z)
    }
    fn operator(&self, z: &Point) -> OperatorValue {
        self.operator.fetch_add(1, Ordering::Relaxed);
        self.inner.operator(z)
    }
    fn jacobian(&self, z: &Point) -> JacobianValue {
        self.jacobian.fetch_add(1, Ordering::Relaxed);
        self.inner.jacobian(z)
    }
}

/// `f(x, y) + (σ/2)‖x - x̄‖² - (σ/2)‖y - ȳ‖²`.
///
/// The operator gains `σ(z - z̄)` and the Jacobian gains `σI`; with `σ = 0`
/// the wrapper is transparent.
#[derive(Debug, Clone)]
pub struct RegularizedOracle<O> {
    base: O,
    sigma: f64,
    center: Point,
}

/// Wraps `base` with a proximal term of weight `sigma` around `center`.
///
/// # Panics
/// If `sigma` is negative or not finite, or `center` has the wrong dimensions.
pub fn regularize<O: SaddleOracle>(base: O, sigma: f64, center: Point) -> RegularizedOracle<O> {
    assert!(
        sigma >= 0.0 && sigma.is_finite(),
        "regularization weight must be finite and nonnegative (got {sigma})"
    );
    center.check_dims(base.dims());
    RegularizedOracle {
        base,
        sigma,
        center,
    }
}

impl<O: SaddleOracle> RegularizedOracle<O> {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn base(&self) -> &O {
        &self.base
    }
}

impl<O: SaddleOracle> SaddleOracle for RegularizedOracle<O> {
    fn dims(&self) -> ProblemDims {
        self.base.dims()
    }

    fn value(&self, z: &Point) -> f64 {
        let dims = self.dims();
        let diff = z.data() - self.center.data();
        let dx = diff.rows(0, dims.m).norm_squared();
        let dy = diff.rows(dims.m, dims.n).norm_squared();
        self.base.value(z) + 0.5 * self.sigma * (dx - dy)
    }

    fn operator(&self, z: &Point) -> OperatorValue {
        let mut f = self.base.operator(z).0;
        if self.sigma != 0.0 {
            f.axpy(self.sigma, &(z.data() - self.center.data()), 1.0);
        }
        OperatorValue(f)
    }

    fn jacobian(&self, z: &Point) -> JacobianValue {
        let mut j = self.base.jacobian(z).0;
        if self.sigma != 0.0 {
            let d = j.nrows();
            j += DMatrix::<f64>::identity(d, d) * self.sigma;
        }
        JacobianValue(j)
    }
}
