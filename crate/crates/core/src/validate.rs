//! Numerical checks of oracle implementations.

use nalgebra::{DMatrix, DVector};

use crate::oracle::SaddleOracle;
use crate::point::Point;

/// Relative errors of the oracle's derivatives against central differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDifferenceReport {
    /// `‖∇f_fd - ∇f‖ / ‖∇f‖`, with `∇f = [F_x; -F_y]` from `operator`.
    pub grad_err: f64,
    /// `‖DF_fd - DF‖_F / ‖DF‖_F`, differencing `operator`.
    pub jac_err: f64,
}

fn relative(diff: f64, reference: f64) -> f64 {
    if reference > 0.0 {
        diff / reference
    } else {
        diff
    }
}

/// Central-difference check with step `h` along each coordinate.
///
/// `z` must stay at least `h` away from points where the oracle is not
/// twice differentiable (for the cubic problem, `‖x‖ > h`).
pub fn finite_difference_check<O: SaddleOracle + ?Sized>(oracle: &O, z: &Point, h: f64) -> FiniteDifferenceReport {
    assert!(h > 0.0, "finite-difference step must be positive");
    let dims = oracle.dims();
    z.check_dims(dims);
    let d = dims.total();

    let gradient = oracle.operator(z).gradient(dims);
    let jacobian = oracle.jacobian(z).0;
    let mut fd_grad = DVector::zeros(d);
    let mut fd_jac = DMatrix::zeros(d, d);
    for i in 0..d {
        let mut e = DVector::zeros(d);
        e[i] = h;
        let plus = z.offset(&e);
        let minus = z.offset(&-&e);
        fd_grad[i] = (oracle.value(&plus) - oracle.value(&minus)) / (2.0 * h);
        let col = (oracle.operator(&plus).0 - oracle.operator(&minus).0) / (2.0 * h);
        fd_jac.set_column(i, &col);
    }

    FiniteDifferenceReport {
        grad_err: relative((&fd_grad - &gradient).norm(), gradient.norm()),
        jac_err: relative((&fd_jac - &jacobian).norm(), jacobian.norm()),
    }
}

/// Smallest eigenvalue of the symmetric part of `DF(z)`. Nonnegative (up to
/// rounding) for convex-concave `f`.
pub fn monotonicity_margin<O: SaddleOracle + ?Sized>(oracle: &O, z: &Point) -> f64 {
    oracle.jacobian(z).min_symmetric_eigenvalue()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::regularize;
    use crate::problems::{make_cubic_bilinear, BSource, BilinearToyProblem};
    use nalgebra::DMatrix;

    #[test]
    fn bilinear_toy_is_exact_to_rounding() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 0.5, 3.0]);
        let p = BilinearToyProblem::new(a);
        let z = Point::from_parts(&[0.3, -0.7], &[1.1, 0.2]);
        let r = finite_difference_check(&p, &z, 1e-5);
        assert!(r.jac_err < 1e-10, "{r:?}");
        assert!(r.grad_err < 1e-9, "{r:?}");
    }

    #[test]
    fn cubic_and_regularized_pass() {
        let p = make_cubic_bilinear(3, 10.0, DMatrix::identity(3, 3), BSource::Seed(1)).unwrap();
        let z = Point::from_parts(&[0.6, -0.4, 0.3], &[1.0, 2.0, -1.5]);
        let r = finite_difference_check(&p, &z, 1e-5);
        assert!(r.grad_err <= 1e-5 && r.jac_err <= 1e-5, "{r:?}");
        let reg = regularize(&p, 2.0, Point::from_parts(&[0.1, 0.2, 0.3], &[-0.1, 0.0, 0.4]));
        let r = finite_difference_check(&reg, &z, 1e-5);
        assert!(r.grad_err <= 1e-5 && r.jac_err <= 1e-5, "{r:?}");
    }

    #[test]
    fn cubic_is_monotone() {
        let p = make_cubic_bilinear(3, 10.0, DMatrix::identity(3, 3), BSource::Seed(1)).unwrap();
        let z = Point::from_parts(&[0.6, -0.4, 0.3], &[1.0, 2.0, -1.5]);
        let j = p.jacobian(&z);
        assert!(monotonicity_margin(&p, &z) >= -1e-8 * (1.0 + j.frobenius_norm()));
    }
}
