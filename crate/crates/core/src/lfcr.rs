//! Lipschitz-free cubic regularization (LF-CR).
//!
//! Each iteration solves the cubic step at `ẑ_k` with the current estimate
//! `H`, doubling `H` until the linearization error of `F` is bounded by
//! `(H/2)‖z_{k+1} - ẑ_k‖²`. The anchor then takes an extragradient step
//! `ẑ_{k+1} = ẑ_k - λ_{k+1} F(z_{k+1})` with `λ_{k+1} = c/(H_k‖z_{k+1} - ẑ_k‖)`,
//! and the output is the `λ`-weighted average of the `z_{k+1}`.

use std::time::Instant;

use nalgebra::DVector;

use crate::cubic::{solve_cubic_step, zero_cutoff, CubicStepResult};
use crate::error::SolverError;
use crate::oracle::{CountedOracle, EvalCounts, SaddleOracle};
use crate::point::{JacobianValue, OperatorValue, Point};

pub const C_MIN: f64 = 1.0 / 33.0;
pub const C_MAX: f64 = 1.0 / 13.0;
pub const DEFAULT_BACKTRACK_CAP: usize = 60;

/// Relative size of floating-point noise in one operator evaluation.
const ROUNDING: f64 = 4.0 * f64::EPSILON;

#[derive(Debug, Clone, PartialEq)]
pub struct LfcrConfig {
    /// Step constant in `λH‖Δ‖ = c`, admissible range `[1/33, 1/13]`.
    pub c: f64,
    /// Initial Hessian-Lipschitz estimate.
    pub h0: f64,
    pub max_iters: usize,
    /// Stop once `‖F(z̄_k)‖ ≤ grad_tol`. Zero disables the test.
    pub grad_tol: f64,
    pub backtrack_cap: usize,
    /// Keep every accepted step (anchor, new point, check values) in the output.
    pub record_steps: bool,
}

impl Default for LfcrConfig {
    fn default() -> Self {
        Self {
            c: C_MAX,
            h0: 1.0,
            max_iters: 1000,
            grad_tol: 0.0,
            backtrack_cap: DEFAULT_BACKTRACK_CAP,
            record_steps: false,
        }
    }
}

pub(crate) fn check_step_constant(c: f64) -> Result<(), SolverError> {
    if (C_MIN..=C_MAX).contains(&c) {
        Ok(())
    } else {
        Err(SolverError::InvalidConfig {
            name: "c",
            reason: format!("{c} is outside [1/33, 1/13]"),
        })
    }
}

pub(crate) fn check_positive(name: &'static str, v: f64) -> Result<(), SolverError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(SolverError::InvalidConfig {
            name,
            reason: format!("must be positive and finite, got {v}"),
        })
    }
}

impl LfcrConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        check_step_constant(self.c)?;
        check_positive("h0", self.h0)?;
        if self.grad_tol.is_nan() || self.grad_tol < 0.0 {
            return Err(SolverError::InvalidConfig {
                name: "grad_tol",
                reason: format!("must be nonnegative, got {}", self.grad_tol),
            });
        }
        Ok(())
    }
}

/// Both sides of the acceptance inequality
/// `‖F(z⁺) - F(ẑ) - DF(ẑ)(z⁺ - ẑ)‖ ≤ (H/2)‖z⁺ - ẑ‖²`.
///
/// `floor` is the rounding level of the left-hand side, estimated from the
/// magnitudes entering the evaluation of `F`. Once the step is so small that
/// the right-hand side drops below it the test cannot resolve anything, and
/// the step is accepted when `lhs ≤ rhs + floor`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearizationCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub floor: f64,
}

impl LinearizationCheck {
    pub fn evaluate(
        z_hat: &Point,
        z_new: &Point,
        f_hat: &OperatorValue,
        f_new: &OperatorValue,
        j_hat: &JacobianValue,
        h: f64,
    ) -> Self {
        let step = z_new.data() - z_hat.data();
        let lin = &f_new.0 - &f_hat.0 - &j_hat.0 * &step;
        let lhs = if f_new.is_finite() { lin.norm() } else { f64::INFINITY };
        let rhs = 0.5 * h * step.norm_squared();
        let floor = ROUNDING
            * (f_hat.norm() + f_new.norm() + j_hat.frobenius_norm() * (z_hat.norm() + z_new.norm()));
        Self { lhs, rhs, floor }
    }

    pub fn accepted(&self) -> bool {
        self.lhs <= self.rhs + self.floor
    }

    /// Whether the exact inequality holds without the rounding allowance.
    pub fn strict(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// Rounding level of `‖F(z)‖`; an operator value below it is zero to working
/// precision.
pub(crate) fn operator_floor(f: &OperatorValue, j: &JacobianValue, z: &Point) -> f64 {
    ROUNDING * (f.norm() + j.frobenius_norm() * z.norm())
}

/// How the constant in the cubic step is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepPolicy {
    /// Start from the previous estimate and double until the linearization
    /// check passes, at most `cap` times.
    Backtrack { cap: usize },
    /// Use the starting constant as is, without a check.
    Fixed,
}

/// Outcome of one backtracking search.
#[derive(Debug, Clone)]
pub struct BacktrackOutcome {
    pub h: f64,
    pub step: CubicStepResult,
    /// `F(z_next)`.
    pub f_new: OperatorValue,
    pub check: LinearizationCheck,
    pub doublings: usize,
    /// Factorizations over all trials.
    pub factorizations: usize,
}

impl BacktrackOutcome {
    pub fn z_next(&self) -> &Point {
        &self.step.z_new
    }
}

/// Finds the smallest `H = h_start·2^j` whose cubic step at `z_hat` passes
/// the linearization check. `g` and `j` are `F(z_hat)` and `DF(z_hat)`.
pub fn backtrack_cubic_step<O: SaddleOracle + ?Sized>(
    oracle: &O,
    z_hat: &Point,
    g: &OperatorValue,
    j: &JacobianValue,
    h_start: f64,
    policy: StepPolicy,
) -> Result<BacktrackOutcome, SolverError> {
    assert!(h_start > 0.0 && h_start.is_finite(), "starting estimate must be positive (got {h_start})");
    let g_norm = g.norm();
    let cap = match policy {
        StepPolicy::Backtrack { cap } => cap,
        StepPolicy::Fixed => 0,
    };
    let mut h = h_start;
    let mut factorizations = 0;
    for doublings in 0..=cap {
        let step = solve_cubic_step(z_hat, g, j, h)?;
        factorizations += step.factorizations;
        let zero_operator = g_norm <= zero_cutoff(j);
        if step.step_norm == 0.0 && !zero_operator {
            return Err(SolverError::DegenerateStep { operator_norm: g_norm });
        }
        let f_new = if zero_operator { g.clone() } else { oracle.operator(&step.z_new) };
        let check = LinearizationCheck::evaluate(z_hat, &step.z_new, g, &f_new, j, h);
        if matches!(policy, StepPolicy::Fixed) || check.accepted() {
            return Ok(BacktrackOutcome {
                h,
                step,
                f_new,
                check,
                doublings,
                factorizations,
            });
        }
        if doublings < cap {
            h *= 2.0;
        }
    }
    Err(SolverError::BacktrackFailed { cap, last_estimate: h })
}

/// `ẑ - λF`.
pub fn extragradient_update(z_hat: &Point, f_next: &OperatorValue, lambda: f64) -> Point {
    assert!(lambda > 0.0, "extragradient step must be positive (got {lambda})");
    z_hat.offset(&(&f_next.0 * -lambda))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LfcrTraceRow {
    pub k: usize,
    /// Accepted `H_k`.
    pub h: f64,
    /// `‖z_{k+1} - ẑ_k‖`.
    pub step_norm: f64,
    /// `λ_{k+1}`; `None` on a terminating stationary step.
    pub lambda: Option<f64>,
    /// `‖F(z̄_k)‖` of the monitored oracle.
    pub grad_norm: f64,
    pub backtracks: usize,
    pub counts: EvalCounts,
    /// Milliseconds since the runner was created.
    pub wall_ms: f64,
}

/// Data of one accepted step, for independent re-verification.
#[derive(Debug, Clone)]
pub struct LfcrStep {
    pub k: usize,
    pub z_hat: Point,
    pub z_next: Point,
    /// The solver's step `Δ`; `z_next` is `z_hat + Δ` after rounding.
    pub delta: DVector<f64>,
    pub h: f64,
    pub lambda: Option<f64>,
    pub check: LinearizationCheck,
}

#[derive(Debug, Clone)]
pub struct LfcrState {
    /// Index of the next iteration (starts at 1).
    pub k: usize,
    pub z_hat: Point,
    pub h: f64,
    pub weight_sum: f64,
    pub weighted_point_sum: DVector<f64>,
    pub trace: Vec<LfcrTraceRow>,
}

/// `Σλ_{i+1} z_{i+1} / Σλ_{i+1}`.
///
/// # Panics
/// If no weight has been accumulated.
pub fn weighted_average(state: &LfcrState) -> Point {
    assert!(state.weight_sum > 0.0, "weighted average needs a positive weight sum");
    Point::new(&state.weighted_point_sum / state.weight_sum, state.z_hat.dims())
}

#[derive(Debug, Clone, PartialEq)]
pub enum LfcrStatus {
    MaxIterations,
    GradTolReached,
    /// The operator vanished to working precision at the returned point.
    Stationary,
    Failed(SolverError),
}

#[derive(Debug, Clone)]
pub struct LfcrOutput {
    /// The weighted average, or the stationary point on early exit.
    pub z_bar: Point,
    pub h_final: f64,
    pub iterations: usize,
    pub status: LfcrStatus,
    pub trace: Vec<LfcrTraceRow>,
    pub steps: Vec<LfcrStep>,
    pub counts: EvalCounts,
}

/// What one call to [`LfcrRunner::step`] did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepEvent {
    Advanced,
    Stationary,
}

enum Monitor<'a> {
    Own,
    External(&'a dyn SaddleOracle),
}

pub(crate) fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Step-wise LF-CR driver. [`run_lfcr`] wraps it; callers that need a
/// dynamic iteration budget drive it directly.
pub struct LfcrRunner<'a, O: SaddleOracle + ?Sized> {
    oracle: CountedOracle<&'a O>,
    monitor: Monitor<'a>,
    c: f64,
    policy: StepPolicy,
    record_steps: bool,
    state: LfcrState,
    steps: Vec<LfcrStep>,
    stationary_point: Option<Point>,
    iterations: usize,
    started: Instant,
}

impl<'a, O: SaddleOracle + ?Sized> LfcrRunner<'a, O> {
    pub fn new(oracle: &'a O, z0: Point, c: f64, h0: f64, policy: StepPolicy) -> Self {
        z0.check_dims(oracle.dims());
        let d = z0.dims().total();
        Self {
            oracle: CountedOracle::new(oracle),
            monitor: Monitor::Own,
            c,
            policy,
            record_steps: false,
            state: LfcrState {
                k: 1,
                z_hat: z0,
                h: h0,
                weight_sum: 0.0,
                weighted_point_sum: DVector::zeros(d),
                trace: Vec::new(),
            },
            steps: Vec::new(),
            stationary_point: None,
            iterations: 0,
            started: Instant::now(),
        }
    }

    /// Records `‖F(z̄_k)‖` of `monitor` instead of the solved oracle.
    pub fn with_monitor(mut self, monitor: &'a dyn SaddleOracle) -> Self {
        self.monitor = Monitor::External(monitor);
        self
    }

    pub fn recording_steps(mut self, on: bool) -> Self {
        self.record_steps = on;
        self
    }

    pub fn state(&self) -> &LfcrState {
        &self.state
    }

    pub fn h(&self) -> f64 {
        self.state.h
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn counts(&self) -> EvalCounts {
        self.oracle.counts()
    }

    pub fn last_row(&self) -> Option<&LfcrTraceRow> {
        self.state.trace.last()
    }

    pub fn is_stationary(&self) -> bool {
        self.stationary_point.is_some()
    }

    /// The current output: the stationary point if one was hit, else the
    /// weighted average, else the starting anchor.
    pub fn output_point(&self) -> Point {
        if let Some(z) = &self.stationary_point {
            z.clone()
        } else if self.state.weight_sum > 0.0 {
            weighted_average(&self.state)
        } else {
            self.state.z_hat.clone()
        }
    }

    fn monitor_norm(&self, z: &Point) -> f64 {
        match self.monitor {
            Monitor::Own => self.oracle.operator(z).norm(),
            Monitor::External(m) => m.operator(z).norm(),
        }
    }

    /// Runs one iteration.
    ///
    /// # Panics
    /// If called after a stationary point was returned.
    pub fn step(&mut self) -> Result<StepEvent, SolverError> {
        assert!(self.stationary_point.is_none(), "LF-CR already stopped at a stationary point");
        let k = self.state.k;
        let z_hat = self.state.z_hat.clone();
        let g = self.oracle.operator(&z_hat);
        let j = self.oracle.jacobian(&z_hat);
        if !g.is_finite() || !j.is_finite() {
            return Err(SolverError::NonFinite { context: "operator or Jacobian at the anchor" });
        }

        let bt = backtrack_cubic_step(&self.oracle, &z_hat, &g, &j, self.state.h, self.policy)?;
        self.oracle.add_linear_solves(bt.factorizations as u64);
        self.state.h = bt.h;
        self.iterations += 1;
        let z_next = bt.step.z_new.clone();

        let stationary = bt.f_new.is_zero()
            || bt.step.step_norm == 0.0
            || bt.f_new.norm() <= operator_floor(&bt.f_new, &j, &z_next);

        let lambda = if stationary {
            None
        } else {
            let lambda = self.c / (bt.h * bt.step.step_norm);
            if !lambda.is_finite() {
                return Err(SolverError::NonFinite { context: "extragradient step size" });
            }
            Some(lambda)
        };

        if self.record_steps {
            self.steps.push(LfcrStep {
                k,
                z_hat: z_hat.clone(),
                z_next: z_next.clone(),
                delta: bt.step.step.clone(),
                h: bt.h,
                lambda,
                check: bt.check,
            });
        }

        let event = match lambda {
            None => {
                let grad_norm = self.monitor_norm(&z_next);
                self.stationary_point = Some(z_next);
                self.push_row(k, &bt, None, grad_norm);
                StepEvent::Stationary
            }
            Some(lambda) => {
                let z_hat_next = extragradient_update(&z_hat, &bt.f_new, lambda);
                if !z_hat_next.is_finite() {
                    return Err(SolverError::NonFinite { context: "extragradient update" });
                }
                self.state.weight_sum += lambda;
                self.state.weighted_point_sum.axpy(lambda, z_next.data(), 1.0);
                let z_bar = weighted_average(&self.state);
                let grad_norm = self.monitor_norm(&z_bar);
                self.state.z_hat = z_hat_next;
                self.push_row(k, &bt, Some(lambda), grad_norm);
                StepEvent::Advanced
            }
        };
        self.state.k += 1;
        Ok(event)
    }

    fn push_row(&mut self, k: usize, bt: &BacktrackOutcome, lambda: Option<f64>, grad_norm: f64) {
        let counts = self.oracle.counts();
        self.state.trace.push(LfcrTraceRow {
            k,
            h: bt.h,
            step_norm: bt.step.step_norm,
            lambda,
            grad_norm,
            backtracks: bt.doublings,
            counts,
            wall_ms: elapsed_ms(self.started),
        });
    }

    pub fn finish(self, status: LfcrStatus) -> LfcrOutput {
        let z_bar = self.output_point();
        let counts = self.oracle.counts();
        LfcrOutput {
            z_bar,
            h_final: self.state.h,
            iterations: self.iterations,
            status,
            trace: self.state.trace,
            steps: self.steps,
            counts,
        }
    }
}

pub(crate) fn drive<O: SaddleOracle + ?Sized>(
    mut runner: LfcrRunner<'_, O>,
    max_iters: usize,
    grad_tol: f64,
) -> LfcrOutput {
    while runner.iterations() < max_iters {
        match runner.step() {
            Ok(StepEvent::Stationary) => return runner.finish(LfcrStatus::Stationary),
            Ok(StepEvent::Advanced) => {
                let reached = runner.last_row().is_some_and(|r| r.grad_norm <= grad_tol);
                if grad_tol > 0.0 && reached {
                    return runner.finish(LfcrStatus::GradTolReached);
                }
            }
            Err(e) => return runner.finish(LfcrStatus::Failed(e)),
        }
    }
    runner.finish(LfcrStatus::MaxIterations)
}

/// Runs LF-CR from `z0`.
///
/// Invalid configurations and algorithm failures both come back as
/// `status = Failed(..)` with whatever trace was produced.
pub fn run_lfcr<O: SaddleOracle + ?Sized>(oracle: &O, z0: Point, config: &LfcrConfig) -> LfcrOutput {
    let runner = LfcrRunner::new(oracle, z0, config.c, config.h0, StepPolicy::Backtrack { cap: config.backtrack_cap })
        .recording_steps(config.record_steps);
    if let Err(e) = config.validate() {
        return runner.finish(LfcrStatus::Failed(e));
    }
    drive(runner, config.max_iters, config.grad_tol)
}
