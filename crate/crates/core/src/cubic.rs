//! Exact solver for the cubic-regularized Newton step
//!
//! ```text
//! g + J(z - ẑ) + 6H‖z - ẑ‖(z - ẑ) = 0,
//! ```
//!
//! with `g = F(ẑ)` and `J = DF(ẑ)`. Writing `θ = 6H‖z - ẑ‖` turns it into the
//! shifted linear system `(J + θI)Δ = -g` coupled with the scalar secular
//! equation
//!
//! ```text
//! φ(θ) = ‖(J + θI)⁻¹g‖ - θ/(6H) = 0,
//! ```
//!
//! which is strictly decreasing and convex for `θ > 0` when `J` is monotone.
//! The root is found by Newton's method on `φ`, safeguarded by a bisection
//! bracket.

use nalgebra::{DMatrix, DVector};

use crate::error::SolverError;
use crate::point::{JacobianValue, OperatorValue, Point};

/// Relative tolerance on `|θ - 6H‖Δ‖|` and on `|φ|`.
pub const THETA_TOL: f64 = 1e-10;
/// Newton iteration cap for the secular equation.
pub const MAX_NEWTON_ITERS: usize = 100;
const THETA_MIN: f64 = 1e-12;
const THETA_MAX: f64 = 1e12;

/// Below this operator norm the step is exactly zero: `1e-14·(1 + ‖J‖_F)`.
pub fn zero_cutoff(j: &JacobianValue) -> f64 {
    1e-14 * (1.0 + j.frobenius_norm())
}

/// One solved cubic step.
#[derive(Debug, Clone)]
pub struct CubicStepResult {
    pub z_new: Point,
    /// `Δ = z_new - ẑ`.
    pub step: DVector<f64>,
    /// Shift `θ`, equal to `6H‖Δ‖` up to [`THETA_TOL`].
    pub theta: f64,
    pub step_norm: f64,
    /// `‖g + JΔ + 6H‖Δ‖Δ‖`.
    pub residual: f64,
    pub newton_iters: usize,
    pub bisection_fallbacks: usize,
    /// LU factorizations of `J + θI` performed.
    pub factorizations: usize,
}

struct SecularEval {
    phi: f64,
    dphi: f64,
    /// `(J + θI)⁻¹g`
    w: DVector<f64>,
}

fn evaluate(g: &DVector<f64>, j: &DMatrix<f64>, h: f64, theta: f64) -> Option<SecularEval> {
    let d = j.nrows();
    let mut shifted = j.clone();
    for i in 0..d {
        shifted[(i, i)] += theta;
    }
    let lu = shifted.lu();
    let w = lu.solve(g)?;
    let u = lu.solve(&w)?;
    let wn = w.norm();
    let phi = wn - theta / (6.0 * h);
    let dphi = if wn > 0.0 { -w.dot(&u) / wn } else { 0.0 } - 1.0 / (6.0 * h);
    (phi.is_finite() && dphi.is_finite() && w.iter().all(|v| v.is_finite())).then_some(SecularEval { phi, dphi, w })
}

fn check_inputs(g: &OperatorValue, j: &JacobianValue, h: f64) {
    assert!(h > 0.0 && h.is_finite(), "regularization constant must be positive (got {h})");
    assert_eq!(g.len(), j.dim(), "operator and Jacobian dimensions differ");
}

/// `φ(θ)` and `φ'(θ)` from one factorization of `J + θI`.
///
/// `φ'(θ) = -wᵀu/‖w‖ - 1/(6H)` with `w = (J + θI)⁻¹g` and `u = (J + θI)⁻¹w`.
pub fn secular_phi(g: &OperatorValue, j: &JacobianValue, h: f64, theta: f64) -> Result<(f64, f64), SolverError> {
    check_inputs(g, j, h);
    assert!(theta > 0.0, "secular function is evaluated at θ > 0 (got {theta})");
    evaluate(&g.0, &j.0, h, theta)
        .map(|e| (e.phi, e.dphi))
        .ok_or(SolverError::SingularSystem { theta })
}

struct SecularRoot {
    theta: f64,
    w: DVector<f64>,
    newton_iters: usize,
    bisection_fallbacks: usize,
    factorizations: usize,
}

fn solve_secular(g: &DVector<f64>, j: &JacobianValue, h: f64, tol: f64) -> Result<SecularRoot, SolverError> {
    let g_norm = g.norm();
    if g_norm <= zero_cutoff(j) {
        return Ok(SecularRoot {
            theta: 0.0,
            w: DVector::zeros(g.len()),
            newton_iters: 0,
            bisection_fallbacks: 0,
            factorizations: 0,
        });
    }

    // φ(0⁺) > 0 whenever g ≠ 0, so 0 is always a valid lower end.
    let mut lo = 0.0_f64;
    let mut hi: Option<f64> = None;
    let mut theta = (6.0 * h * g_norm / (1.0 + j.frobenius_norm())).clamp(THETA_MIN, THETA_MAX);
    let mut fallbacks = 0;
    let mut best: Option<(f64, SecularEval)> = None;

    // one factorization per iteration
    for iter in 1..=MAX_NEWTON_ITERS {
        let Some(eval) = evaluate(g, &j.0, h, theta) else {
            // J + θI is singular this close to zero: move right.
            lo = theta;
            fallbacks += 1;
            theta = match hi {
                Some(hi) => 0.5 * (lo + hi),
                None => 2.0 * theta,
            };
            continue;
        };

        if eval.phi > 0.0 {
            lo = theta;
        } else {
            hi = Some(theta);
        }

        let coupling = 6.0 * h * eval.phi.abs();
        let w_norm = eval.w.norm();
        let converged = eval.phi.abs() <= tol * (1.0 + g_norm)
            && coupling <= tol * (1.0 + theta)
            && coupling * w_norm <= tol * (1.0 + g_norm);
        let collapsed = hi.is_some_and(|hi| hi - lo <= 4.0 * f64::EPSILON * hi);
        let better = best.as_ref().is_none_or(|(_, b)| eval.phi.abs() < b.phi.abs());
        let newton = theta - eval.phi / eval.dphi;
        if better {
            best = Some((theta, eval));
        }
        if converged || collapsed {
            let (theta, eval) = best.expect("best is set on the first evaluation");
            return Ok(SecularRoot {
                theta,
                w: eval.w,
                newton_iters: iter,
                bisection_fallbacks: fallbacks,
                factorizations: iter,
            });
        }

        theta = match hi {
            Some(hi) if newton.is_nan() || newton <= lo || newton >= hi => {
                fallbacks += 1;
                0.5 * (lo + hi)
            }
            None if newton.is_nan() || newton <= lo => {
                fallbacks += 1;
                2.0 * lo.max(THETA_MIN)
            }
            _ => newton,
        };
    }

    Err(SolverError::SecularNonConvergence {
        iterations: MAX_NEWTON_ITERS,
        lo,
        hi: hi.unwrap_or(f64::INFINITY),
    })
}

/// Root `θ*` of the secular equation, or 0 when `‖g‖` is below
/// [`zero_cutoff`].
pub fn solve_theta(g: &OperatorValue, j: &JacobianValue, h: f64, tol: f64) -> Result<f64, SolverError> {
    check_inputs(g, j, h);
    solve_secular(&g.0, j, h, tol).map(|r| r.theta)
}

/// Solves the cubic step at `ẑ` with `g = F(ẑ)`, `J = DF(ẑ)` and constant `H`.
pub fn solve_cubic_step(
    z_hat: &Point,
    g: &OperatorValue,
    j: &JacobianValue,
    h: f64,
) -> Result<CubicStepResult, SolverError> {
    check_inputs(g, j, h);
    assert_eq!(z_hat.dims().total(), g.len(), "point and operator dimensions differ");
    let root = solve_secular(&g.0, j, h, THETA_TOL)?;
    let step = -root.w;
    let step_norm = step.norm();
    let z_new = z_hat.offset(&step);
    let residual = residual_of_step(&g.0, &j.0, h, &step);
    Ok(CubicStepResult {
        z_new,
        step,
        theta: root.theta,
        step_norm,
        residual,
        newton_iters: root.newton_iters,
        bisection_fallbacks: root.bisection_fallbacks,
        factorizations: root.factorizations,
    })
}

fn residual_of_step(g: &DVector<f64>, j: &DMatrix<f64>, h: f64, step: &DVector<f64>) -> f64 {
    let mut r = g + j * step;
    r.axpy(6.0 * h * step.norm(), step, 1.0);
    r.norm()
}

/// `‖g + J(z_new - ẑ) + 6H‖z_new - ẑ‖(z_new - ẑ)‖`.
pub fn step_residual(z_hat: &Point, z_new: &Point, g: &OperatorValue, j: &JacobianValue, h: f64) -> f64 {
    let step = z_new.data() - z_hat.data();
    residual_of_step(&g.0, &j.0, h, &step)
}
