//! Comparison methods: extragradient and the cubic method with a known
//! Hessian-Lipschitz constant.

use crate::error::SolverError;
use std::time::Instant;

use crate::lfcr::{check_positive, check_step_constant, drive, elapsed_ms, LfcrOutput, LfcrRunner, LfcrStatus, StepPolicy, C_MAX};
use crate::oracle::{CountedOracle, EvalCounts, SaddleOracle};
use crate::point::Point;

#[derive(Debug, Clone, PartialEq)]
pub struct EgConfig {
    pub eta: f64,
    pub max_iters: usize,
    /// Stop once `‖F(z_k)‖ ≤ grad_tol`. Zero disables the test.
    pub grad_tol: f64,
}

impl EgConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        check_positive("eta", self.eta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EgTraceRow {
    pub k: usize,
    /// `‖F(z_k)‖`.
    pub grad_norm: f64,
    /// `‖z_k - z_{k-1}‖`, zero for `k = 0`.
    pub step_norm: f64,
    pub operator_evals: u64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EgStatus {
    MaxIterations,
    GradTolReached,
    Stationary,
    Failed(SolverError),
}

#[derive(Debug, Clone)]
pub struct EgOutput {
    pub z_final: Point,
    pub iterations: usize,
    pub status: EgStatus,
    pub trace: Vec<EgTraceRow>,
    pub counts: EvalCounts,
}

/// Two-call extragradient: `z_{k+1/2} = z_k - ηF(z_k)`,
/// `z_{k+1} = z_k - ηF(z_{k+1/2})`.
pub fn run_eg<O: SaddleOracle + ?Sized>(oracle: &O, z0: Point, config: &EgConfig) -> EgOutput {
    z0.check_dims(oracle.dims());
    let started = Instant::now();
    let counted = CountedOracle::new(oracle);
    let mut z = z0;
    let mut f = counted.operator(&z);
    let mut trace = vec![EgTraceRow {
        k: 0,
        grad_norm: f.norm(),
        step_norm: 0.0,
        operator_evals: counted.counts().operator,
        wall_ms: elapsed_ms(started),
    }];
    let finish = |z: Point, k: usize, status: EgStatus, trace: Vec<EgTraceRow>| EgOutput {
        z_final: z,
        iterations: k,
        status,
        trace,
        counts: counted.counts(),
    };
    if let Err(e) = config.validate() {
        return finish(z, 0, EgStatus::Failed(e), trace);
    }

    let eta = config.eta;
    let mut k = 0;
    loop {
        let grad_norm = f.norm();
        if !grad_norm.is_finite() {
            return finish(z, k, EgStatus::Failed(SolverError::NonFinite { context: "extragradient iterate" }), trace);
        }
        if f.is_zero() {
            return finish(z, k, EgStatus::Stationary, trace);
        }
        if config.grad_tol > 0.0 && grad_norm <= config.grad_tol {
            return finish(z, k, EgStatus::GradTolReached, trace);
        }
        if k >= config.max_iters {
            return finish(z, k, EgStatus::MaxIterations, trace);
        }
        let half = z.offset(&(&f.0 * -eta));
        let f_half = counted.operator(&half);
        let step = &f_half.0 * -eta;
        z = z.offset(&step);
        f = counted.operator(&z);
        k += 1;
        trace.push(EgTraceRow {
            k,
            grad_norm: f.norm(),
            step_norm: step.norm(),
            operator_evals: counted.counts().operator,
            wall_ms: elapsed_ms(started),
        });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonMinMaxConfig {
    /// Known Hessian-Lipschitz constant, used as a fixed `H`.
    pub rho: f64,
    pub c: f64,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub record_steps: bool,
}

impl Default for NewtonMinMaxConfig {
    fn default() -> Self {
        Self {
            rho: 1.0,
            c: C_MAX,
            max_iters: 1000,
            grad_tol: 0.0,
            record_steps: false,
        }
    }
}

impl NewtonMinMaxConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        check_positive("rho", self.rho)?;
        check_step_constant(self.c)
    }
}

/// The LF-CR loop with `H = ρ` held fixed: no backtracking and no acceptance
/// test, `λ_{k+1} = c/(ρ‖z_{k+1} - ẑ_k‖)`, weighted-average output.
pub fn run_newton_minmax<O: SaddleOracle + ?Sized>(oracle: &O, z0: Point, config: &NewtonMinMaxConfig) -> LfcrOutput {
    let h0 = if config.rho > 0.0 && config.rho.is_finite() { config.rho } else { 1.0 };
    let runner = LfcrRunner::new(oracle, z0, config.c, h0, StepPolicy::Fixed).recording_steps(config.record_steps);
    if let Err(e) = config.validate() {
        return runner.finish(LfcrStatus::Failed(e));
    }
    drive(runner, config.max_iters, config.grad_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfcr::{run_lfcr, LfcrConfig};
    use crate::oracle::GroundTruth;
    use crate::problems::{BilinearToyProblem, ScalarToyProblem};
    use nalgebra::DMatrix;

    #[test]
    fn eg_stays_at_saddle() {
        let p = ScalarToyProblem::new(2.0, 1.0, 1.0);
        let z = p.known_saddle().unwrap();
        let out = run_eg(&p, z.clone(), &EgConfig { eta: 0.1, max_iters: 10, grad_tol: 0.0 });
        assert_eq!(out.z_final, z);
        assert_eq!(out.status, EgStatus::Stationary);
    }

    #[test]
    fn eg_contracts_on_bilinear_toy() {
        // For f = xy the iteration matrix is (1 - η²)I - ηJ, J = [[0, 1], [-1, 0]].
        let p = BilinearToyProblem::new(DMatrix::from_element(1, 1, 1.0));
        let eta = 0.1;
        let z0 = Point::from_parts(&[1.0], &[0.0]);
        let out = run_eg(&p, z0.clone(), &EgConfig { eta, max_iters: 1, grad_tol: 0.0 });
        let expected = [1.0 - eta * eta, eta];
        assert!((out.z_final.data()[0] - expected[0]).abs() < 1e-15);
        assert!((out.z_final.data()[1] - expected[1]).abs() < 1e-15);
        assert!(out.z_final.norm() < z0.norm());
        assert_eq!(out.counts.operator, 3);
    }

    #[test]
    fn eg_small_step_is_first_order() {
        let p = ScalarToyProblem::new(2.0, 1.0, 1.0);
        let z0 = Point::from_parts(&[0.3], &[-0.8]);
        let eta = 1e-6;
        let out = run_eg(&p, z0.clone(), &EgConfig { eta, max_iters: 1, grad_tol: 0.0 });
        let disp = out.z_final.data() - z0.data();
        let predicted = p.operator(&z0).0 * -eta;
        assert!((disp - predicted).norm() <= 10.0 * eta * eta);
    }

    #[test]
    fn eg_rejects_nonpositive_eta() {
        let p = ScalarToyProblem::new(2.0, 1.0, 1.0);
        let out = run_eg(&p, Point::from_parts(&[0.0], &[0.0]), &EgConfig { eta: 0.0, max_iters: 1, grad_tol: 0.0 });
        assert!(matches!(out.status, EgStatus::Failed(SolverError::InvalidConfig { name: "eta", .. })));
    }

    #[test]
    fn newton_minmax_at_saddle_returns_start() {
        let p = ScalarToyProblem::new(2.0, 1.0, 1.0);
        let z = p.known_saddle().unwrap();
        let out = run_newton_minmax(&p, z.clone(), &NewtonMinMaxConfig { rho: 2.0, ..Default::default() });
        assert_eq!(out.z_bar, z);
        assert_eq!(out.status, LfcrStatus::Stationary);
    }

    #[test]
    fn newton_minmax_matches_lfcr_without_backtracking() {
        let p = BilinearToyProblem::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, -0.25, 2.0]));
        let z0 = Point::from_parts(&[1.0, -0.5], &[0.25, 0.75]);
        let h = 3.0;
        let lf = run_lfcr(
            &p,
            z0.clone(),
            &LfcrConfig { h0: h, max_iters: 25, record_steps: true, ..Default::default() },
        );
        let nm = run_newton_minmax(
            &p,
            z0,
            &NewtonMinMaxConfig { rho: h, max_iters: 25, record_steps: true, ..Default::default() },
        );
        assert_eq!(lf.h_final, h);
        assert_eq!(lf.steps.len(), nm.steps.len());
        for (a, b) in lf.steps.iter().zip(&nm.steps) {
            assert_eq!(a.z_hat, b.z_hat);
            assert_eq!(a.z_next, b.z_next);
            assert_eq!(a.lambda, b.lambda);
        }
        assert_eq!(lf.z_bar, nm.z_bar);
    }
}
