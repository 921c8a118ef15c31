//! Fully parameter-free cubic regularization (FF-CR).
//!
//! The outer loop guesses a distance `D_t = 4ᵗD₀` to the solution. For each
//! guess a stage restarts from `z₀` and solves a sequence of proximal
//! problems
//!
//! ```text
//! f_k(x, y) = f(x, y) + (σ_k/2)‖x - x̄_k‖² - (σ_k/2)‖y - ȳ_k‖²,
//! σ_k = ε/(41 D_t)·4^k,
//! ```
//!
//! each with LF-CR warm-started from the previous solution, around centers
//! that accumulate the previous solutions. After each proximal solve a
//! verification cubic step on `f_k` backtracks a curvature estimate `M`,
//! which sets how many proximal problems the stage needs. The run stops at
//! the first stage whose output has `‖∇f‖ ≤ ε`.

use std::time::Instant;

use crate::error::SolverError;
use crate::lfcr::{
    backtrack_cubic_step, check_positive, elapsed_ms, check_step_constant, BacktrackOutcome, LfcrRunner, LfcrStep,
    LinearizationCheck, StepEvent, StepPolicy, C_MAX, DEFAULT_BACKTRACK_CAP,
};
use crate::oracle::{regularize, CountedOracle, EvalCounts, RegularizedOracle, SaddleOracle};
use crate::point::{spectral_norm, JacobianValue, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct FfcrConfig {
    /// Target gradient norm `ε`.
    pub epsilon: f64,
    /// Initial curvature estimate, used for both `H` and `M`.
    pub m0: f64,
    /// Initial distance estimate.
    pub d0: f64,
    /// Step constant passed to the inner LF-CR runs.
    pub c: f64,
    pub max_outer: usize,
    pub backtrack_cap: usize,
    /// Start each stage from the previous stage's `M` instead of `m0`.
    pub warm_start_m: bool,
    /// Hard cap on a single inner LF-CR run. `None` runs the full budget.
    pub max_inner_iters: Option<usize>,
    pub record_steps: bool,
}

impl Default for FfcrConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            m0: 1.0,
            d0: 1.0,
            c: C_MAX,
            max_outer: 20,
            backtrack_cap: DEFAULT_BACKTRACK_CAP,
            warm_start_m: false,
            max_inner_iters: None,
            record_steps: false,
        }
    }
}

impl FfcrConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        check_positive("epsilon", self.epsilon)?;
        check_positive("m0", self.m0)?;
        check_positive("d0", self.d0)?;
        check_step_constant(self.c)
    }
}

/// `σ_k = ε/(41 D_t)·4^k`, with `σ_0 = 0`.
pub fn sigma_schedule(eps: f64, d_t: f64, k: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        eps / (41.0 * d_t) * 4f64.powi(k as i32)
    }
}

/// `γ = 1 - σ_prev/σ_k` and `z̄_k = (1 - γ) z̄_{k-1} + γ z_{k-1}`.
///
/// # Panics
/// Unless `sigma_k > sigma_prev ≥ 0`.
pub fn gamma_and_center(sigma_prev: f64, sigma_k: f64, center_prev: &Point, z_prev: &Point) -> (f64, Point) {
    assert!(
        sigma_prev >= 0.0 && sigma_k > sigma_prev,
        "regularization weights must increase (got {sigma_prev} then {sigma_k})"
    );
    center_prev.check_dims(z_prev.dims());
    let gamma = 1.0 - sigma_prev / sigma_k;
    let center = center_prev.data() * (1.0 - gamma) + z_prev.data() * gamma;
    (gamma, Point::new(center, z_prev.dims()))
}

/// `⌈(33√3·8^{3-k}·H·D_t/σ_k)^{2/3}⌉`, at least 1.
pub fn inner_iteration_budget(h_est: f64, d_t: f64, sigma_k: f64, k: usize) -> usize {
    let base = 33.0 * 3f64.sqrt() * 8f64.powi(3 - k as i32) * h_est * d_t / sigma_k;
    let n = base.powf(2.0 / 3.0).ceil();
    if n.is_nan() || n < 1.0 {
        1
    } else if n >= usize::MAX as f64 {
        usize::MAX
    } else {
        n as usize
    }
}

/// Rounding allowance before taking the ceiling of a logarithm, so that
/// `log_8(64)` evaluating to `2 + 4e-16` still gives 2.
const LOG_CEIL_SLACK: f64 = 1e-12;

/// The real-valued maximum inside the stage limit, before the ceiling.
pub fn stage_limit_exponent(m: f64, d_t: f64, df0_norm: f64, eps: f64) -> f64 {
    let log_base = |arg: f64, base: f64| if arg > 1.0 { arg.ln() / base.ln() } else { 0.0 };
    let a = log_base(32.0 * m * d_t * d_t / eps, 64.0);
    let b = log_base(8.0 * m * d_t * d_t / eps, 8.0);
    let c = log_base(4.0 * (12.0f64 / 11.0).sqrt() * df0_norm * d_t / eps, 8.0);
    a.max(b).max(c)
}

/// `K_t = ⌈max{log_64(32MD²/ε), log_8(8MD²/ε), log_8(4√(12/11)‖DF(z₀)‖D/ε)}⌉`,
/// with arguments below 1 contributing 0 and a minimum of 1.
pub fn stage_limit(m: f64, d_t: f64, df0_norm: f64, eps: f64) -> usize {
    let e = stage_limit_exponent(m, d_t, df0_norm, eps);
    ((e - LOG_CEIL_SLACK).ceil() as usize).max(1)
}

/// Spectral norm of `J_a - J_b`.
pub fn spectral_norm_diff(j_a: &JacobianValue, j_b: &JacobianValue) -> f64 {
    assert_eq!(j_a.0.shape(), j_b.0.shape(), "Jacobian shapes differ");
    spectral_norm(&(&j_a.0 - &j_b.0))
}

/// Verification step on the regularized operator at `z_k`: the smallest
/// `M = m_start·2^j` whose cubic step passes the linearization check.
pub fn backtrack_m<O: SaddleOracle>(
    oracle_reg: &RegularizedOracle<O>,
    z_k: &Point,
    m_start: f64,
    cap: usize,
) -> Result<BacktrackOutcome, SolverError> {
    let g = oracle_reg.operator(z_k);
    let j = oracle_reg.jacobian(z_k);
    if !g.is_finite() || !j.is_finite() {
        return Err(SolverError::NonFinite { context: "regularized operator at the stage iterate" });
    }
    backtrack_cubic_step(oracle_reg, z_k, &g, &j, m_start, StepPolicy::Backtrack { cap })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfcrPhase {
    /// One LF-CR iteration on the proximal problem.
    Inner,
    /// The `M` verification step closing proximal problem `k`.
    Verify,
    /// End of stage `t`.
    Stage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FfcrTraceRow {
    pub t: usize,
    pub k: usize,
    /// LF-CR iteration within proximal problem `k`; the verify row follows
    /// the last one and the stage row follows the verify row.
    pub sub: usize,
    pub phase: FfcrPhase,
    /// Cumulative cubic steps (inner iterations plus verifications).
    pub iter: usize,
    /// `‖∇f‖` at the current output (the inner running average, or `z_k`).
    pub grad_norm: f64,
    /// `H` on inner rows, `M` on verify and stage rows.
    pub curvature: f64,
    pub step_norm: f64,
    pub lambda: Option<f64>,
    pub sigma: f64,
    pub d_t: f64,
    pub counts: EvalCounts,
    pub wall_ms: f64,
}

/// Everything about proximal problem `k` of stage `t`.
#[derive(Debug, Clone)]
pub struct ProximalRecord {
    pub t: usize,
    pub k: usize,
    pub sigma: f64,
    pub gamma: f64,
    pub center: Point,
    /// The inner iteration budget under the final `H`.
    pub budget: usize,
    pub inner_iterations: usize,
    pub inner_stationary: bool,
    pub h: f64,
    /// Starting `M` after the seed rule.
    pub m_seed: f64,
    pub m: f64,
    pub stage_limit: usize,
    pub z_k: Point,
    /// Verification point `z̃` and its check.
    pub z_tilde: Point,
    pub check: LinearizationCheck,
}

#[derive(Debug, Clone)]
pub struct FfcrInnerStep {
    pub t: usize,
    pub k: usize,
    pub step: LfcrStep,
}

#[derive(Debug, Clone)]
pub struct StageOutput {
    pub t: usize,
    pub d_t: f64,
    pub z_stage: Point,
    pub m_stage: f64,
    pub h_stage: f64,
    pub grad_norm: f64,
    /// `‖DF(z₀)‖` used in the stage limit.
    pub df0_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FfcrStatus {
    Converged,
    Failed(SolverError),
}

#[derive(Debug, Clone)]
pub struct FfcrOutput {
    pub z_final: Point,
    pub grad_norm_final: f64,
    pub d_final: f64,
    pub m_final: f64,
    pub stages: usize,
    pub total_inner_iterations: usize,
    pub status: FfcrStatus,
    pub trace: Vec<FfcrTraceRow>,
    pub stage_outputs: Vec<StageOutput>,
    pub proximal: Vec<ProximalRecord>,
    /// Accepted inner LF-CR steps when `record_steps` is set.
    pub inner_steps: Vec<FfcrInnerStep>,
    pub counts: EvalCounts,
}

/// Mutable bookkeeping shared by the stages of one run.
struct Recorder<'o, O: SaddleOracle + ?Sized> {
    base: CountedOracle<&'o O>,
    trace: Vec<FfcrTraceRow>,
    proximal: Vec<ProximalRecord>,
    inner_steps: Vec<FfcrInnerStep>,
    iter: usize,
    inner_total: usize,
    record_steps: bool,
    started: Instant,
}

/// Runs one stage for distance guess `d_t`, starting every curvature
/// estimate at `m_start`.
fn run_stage_with<O: SaddleOracle + ?Sized>(
    rec: &mut Recorder<'_, O>,
    z0: &Point,
    t: usize,
    d_t: f64,
    config: &FfcrConfig,
    m_start: f64,
) -> Result<StageOutput, SolverError> {
    let eps = config.epsilon;
    let base = &rec.base;
    let j0 = base.jacobian(z0);
    let df0_norm = j0.spectral_norm();

    let mut center = z0.clone();
    let mut z_prev = z0.clone();
    let mut sigma_prev = 0.0;
    let mut h_prev = m_start;
    let mut m_prev = m_start;

    for k in 1.. {
        let sigma = sigma_schedule(eps, d_t, k);
        let (gamma, new_center) = gamma_and_center(sigma_prev, sigma, &center, &z_prev);
        center = new_center;
        let reg = regularize(&rec.base, sigma, center.clone());

        let mut runner = LfcrRunner::new(&reg, z_prev.clone(), config.c, h_prev, StepPolicy::Backtrack {
            cap: config.backtrack_cap,
        })
        .with_monitor(&rec.base)
        .recording_steps(rec.record_steps);

        let mut solves_seen = 0;
        let mut stationary = false;
        loop {
            let budget = inner_iteration_budget(runner.h(), d_t, sigma, k);
            let capped = config.max_inner_iters.is_some_and(|cap| runner.iterations() >= cap);
            if runner.iterations() >= budget || capped {
                break;
            }
            let event = runner.step()?;
            let solves = runner.counts().linear_solves;
            rec.base.add_linear_solves(solves - solves_seen);
            solves_seen = solves;
            rec.iter += 1;
            rec.inner_total += 1;
            let row = runner.last_row().expect("a row is pushed by every step");
            rec.trace.push(FfcrTraceRow {
                t,
                k,
                sub: runner.iterations(),
                phase: FfcrPhase::Inner,
                iter: rec.iter,
                grad_norm: row.grad_norm,
                curvature: row.h,
                step_norm: row.step_norm,
                lambda: row.lambda,
                sigma,
                d_t,
                counts: rec.base.counts(),
                wall_ms: elapsed_ms(rec.started),
            });
            if event == StepEvent::Stationary {
                stationary = true;
                break;
            }
        }
        let inner_iterations = runner.iterations();
        let budget = inner_iteration_budget(runner.h(), d_t, sigma, k);
        let h_k = runner.h();
        let z_k = runner.output_point();
        let lfcr_out = runner.finish(crate::lfcr::LfcrStatus::MaxIterations);
        if rec.record_steps {
            rec.inner_steps
                .extend(lfcr_out.steps.into_iter().map(|step| FfcrInnerStep { t, k, step }));
        }

        // Seed rule: M starts at max(M_{k-1}, ‖DF(z_k) - DF(z₀)‖/‖z_k - z₀‖).
        let dist = z_k.distance(z0);
        let m_seed = if dist > 0.0 {
            let jk = rec.base.jacobian(&z_k);
            m_prev.max(spectral_norm_diff(&jk, &j0) / dist)
        } else {
            m_prev
        };
        let bt = backtrack_m(&reg, &z_k, m_seed, config.backtrack_cap)?;
        rec.base.add_linear_solves(bt.factorizations as u64);
        rec.iter += 1;
        let m_k = bt.h;
        let limit = stage_limit(m_k, d_t, df0_norm, eps);
        let grad_norm = rec.base.operator(&z_k).norm();
        let verify_sub = inner_iterations + 1;
        rec.trace.push(FfcrTraceRow {
            t,
            k,
            sub: verify_sub,
            phase: FfcrPhase::Verify,
            iter: rec.iter,
            grad_norm,
            curvature: m_k,
            step_norm: bt.step.step_norm,
            lambda: None,
            sigma,
            d_t,
            counts: rec.base.counts(),
            wall_ms: elapsed_ms(rec.started),
        });
        rec.proximal.push(ProximalRecord {
            t,
            k,
            sigma,
            gamma,
            center: center.clone(),
            budget,
            inner_iterations,
            inner_stationary: stationary,
            h: h_k,
            m_seed,
            m: m_k,
            stage_limit: limit,
            z_k: z_k.clone(),
            z_tilde: bt.step.z_new.clone(),
            check: bt.check,
        });

        if k >= limit {
            rec.trace.push(FfcrTraceRow {
                t,
                k,
                sub: verify_sub + 1,
                phase: FfcrPhase::Stage,
                iter: rec.iter,
                grad_norm,
                curvature: m_k,
                step_norm: 0.0,
                lambda: None,
                sigma,
                d_t,
                counts: rec.base.counts(),
                wall_ms: elapsed_ms(rec.started),
            });
            return Ok(StageOutput {
                t,
                d_t,
                z_stage: z_k,
                m_stage: m_k,
                h_stage: h_k,
                grad_norm,
                df0_norm,
            });
        }

        sigma_prev = sigma;
        z_prev = z_k;
        h_prev = h_k;
        m_prev = m_k;
    }
    unreachable!("the stage loop only exits by returning")
}

/// Runs a single stage with distance guess `d_t` and curvature start
/// `m_start`. Returns the stage output and its trace.
pub fn run_stage<O: SaddleOracle + ?Sized>(
    oracle: &O,
    z0: &Point,
    d_t: f64,
    config: &FfcrConfig,
    m_start: f64,
) -> Result<(StageOutput, Vec<FfcrTraceRow>), SolverError> {
    config.validate()?;
    check_positive("d_t", d_t)?;
    z0.check_dims(oracle.dims());
    let mut rec = Recorder {
        base: CountedOracle::new(oracle),
        trace: Vec::new(),
        proximal: Vec::new(),
        inner_steps: Vec::new(),
        iter: 0,
        inner_total: 0,
        started: Instant::now(),
        record_steps: false,
    };
    let out = run_stage_with(&mut rec, z0, 0, d_t, config, m_start)?;
    Ok((out, rec.trace))
}

/// Runs FF-CR from `z0`.
pub fn run_ffcr<O: SaddleOracle + ?Sized>(oracle: &O, z0: Point, config: &FfcrConfig) -> FfcrOutput {
    z0.check_dims(oracle.dims());
    let mut rec = Recorder {
        base: CountedOracle::new(oracle),
        trace: Vec::new(),
        proximal: Vec::new(),
        inner_steps: Vec::new(),
        iter: 0,
        inner_total: 0,
        started: Instant::now(),
        record_steps: config.record_steps,
    };
    let mut stage_outputs: Vec<StageOutput> = Vec::new();

    let status = match config.validate() {
        Err(e) => FfcrStatus::Failed(e),
        Ok(()) => {
            let mut d_t = config.d0;
            let mut m_start = config.m0;
            let mut status = None;
            for t in 0..config.max_outer {
                match run_stage_with(&mut rec, &z0, t, d_t, config, m_start) {
                    Err(e) => {
                        status = Some(FfcrStatus::Failed(e));
                        break;
                    }
                    Ok(stage) => {
                        // independent re-evaluation of the termination test
                        let grad_norm = oracle.operator(&stage.z_stage).norm();
                        let done = grad_norm <= config.epsilon;
                        if config.warm_start_m {
                            m_start = stage.m_stage;
                        }
                        stage_outputs.push(stage);
                        if done {
                            status = Some(FfcrStatus::Converged);
                            break;
                        }
                        d_t *= 4.0;
                    }
                }
            }
            status.unwrap_or_else(|| {
                let best = stage_outputs.iter().map(|s| s.grad_norm).fold(f64::INFINITY, f64::min);
                FfcrStatus::Failed(SolverError::MaxOuterExceeded {
                    stages: stage_outputs.len(),
                    best_grad_norm: best,
                })
            })
        }
    };

    let best = stage_outputs
        .iter()
        .min_by(|a, b| a.grad_norm.total_cmp(&b.grad_norm))
        .cloned();
    let (z_final, m_final) = match (&status, stage_outputs.last(), best) {
        (FfcrStatus::Converged, Some(last), _) => (last.z_stage.clone(), last.m_stage),
        (_, _, Some(best)) => (best.z_stage, best.m_stage),
        _ => (z0.clone(), config.m0),
    };
    let grad_norm_final = oracle.operator(&z_final).norm();
    let d_final = stage_outputs.last().map_or(config.d0, |s| s.d_t);
    FfcrOutput {
        z_final,
        grad_norm_final,
        d_final,
        m_final,
        stages: stage_outputs.len(),
        total_inner_iterations: rec.inner_total,
        status,
        trace: rec.trace,
        stage_outputs,
        proximal: rec.proximal,
        inner_steps: rec.inner_steps,
        counts: rec.base.counts(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::GroundTruth;
    use crate::problems::{BilinearToyProblem, ScalarToyProblem};
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_schedule(41.0, 1.0, 1), 4.0);
        assert_eq!(sigma_schedule(1.0, 1.0, 0), 0.0);
        assert!((sigma_schedule(1e-3, 1.0, 3) - 64.0 / 41000.0).abs() < 1e-18);
        assert!((sigma_schedule(1e-3, 1.0, 3) - 1.56098e-3).abs() < 1e-8);
    }

    #[test]
    fn gamma_examples() {
        let c = Point::from_parts(&[1.0], &[2.0]);
        let z = Point::from_parts(&[5.0], &[-2.0]);
        let (g, center) = gamma_and_center(0.0, 3.0, &c, &z);
        assert_eq!(g, 1.0);
        assert_eq!(center, z);
        let (g, center) = gamma_and_center(0.5, 2.0, &c, &z);
        assert_eq!(g, 0.75);
        assert_eq!(center.data().as_slice(), &[(1.0 + 15.0) / 4.0, (2.0 - 6.0) / 4.0]);
        let (_, center) = gamma_and_center(0.5, 2.0, &c, &c);
        assert_eq!(center, c);
    }

    #[test]
    #[should_panic(expected = "must increase")]
    fn gamma_requires_increasing_sigma() {
        let c = Point::from_parts(&[1.0], &[2.0]);
        gamma_and_center(2.0, 2.0, &c, &c);
    }

    #[test]
    fn budget_examples() {
        let s3 = 33.0 * 3f64.sqrt();
        assert_eq!(inner_iteration_budget(1.0, 1.0, s3, 3), 1);
        // (33√3·64)^{2/3} = 237.46…
        assert_eq!(inner_iteration_budget(1.0, 1.0, 1.0, 1), 238);
        let base = (33.0 * 3f64.sqrt() * 64.0f64).powf(2.0 / 3.0);
        let doubled = inner_iteration_budget(2.0, 1.0, 1.0, 1) as f64;
        assert_eq!(doubled, (base * 2f64.powf(2.0 / 3.0)).ceil());
        assert_eq!(inner_iteration_budget(1e-30, 1.0, 1.0, 9), 1);
    }

    #[test]
    fn stage_limit_examples() {
        assert_eq!(stage_limit(1e-3, 1.0, 0.0, 1.0), 1);
        assert_eq!(stage_limit(1.0, 1.0, 0.0, 1.0 / 8.0), 2);
        // log_8 terms move by exactly 1 when ε shrinks by 8
        let e1 = stage_limit_exponent(1.0, 1.0, 0.0, 1e-3);
        let e2 = stage_limit_exponent(1.0, 1.0, 0.0, 1e-3 / 8.0);
        assert!((e2 - e1 - 1.0).abs() < 1e-12);
        assert_eq!(stage_limit(1.0, 1.0, 0.0, 1e-3 / 8.0), stage_limit(1.0, 1.0, 0.0, 1e-3) + 1);
    }

    #[test]
    fn spectral_norm_diff_examples() {
        let a = JacobianValue(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]));
        assert_eq!(spectral_norm_diff(&a, &a), 0.0);
        let b = JacobianValue(&a.0 - DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -5.0])));
        assert!((spectral_norm_diff(&a, &b) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn backtrack_m_cases() {
        let toy = ScalarToyProblem::new(2.0, 1.0, 1.0);
        let z = Point::from_parts(&[0.0], &[0.0]);
        let reg = regularize(&toy, 0.0, z.clone());
        let bt = backtrack_m(&reg, &z, 1.0, 10).unwrap();
        assert_eq!(bt.h, 1.0);
        assert!((bt.step.step[0] - 0.153355).abs() < 1e-6);
        assert!((bt.step.step[1] + 0.360330).abs() < 1e-6);

        let s = toy.known_saddle().unwrap();
        let reg = regularize(&toy, 3.0, s.clone());
        let bt = backtrack_m(&reg, &s, 1.0, 10).unwrap();
        assert_eq!(bt.z_next(), &s);

        let bil = BilinearToyProblem::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]));
        let z = Point::from_parts(&[1.0, 1.0], &[0.5, -0.5]);
        let reg = regularize(&bil, 0.7, Point::zeros(bil.dims()));
        for m in [1e-2, 1.0, 10.0] {
            let bt = backtrack_m(&reg, &z, m, 3).unwrap();
            assert_eq!((bt.h, bt.doublings), (m, 0));
        }
    }

    #[test]
    fn saddle_start_stage_ends_at_saddle() {
        let toy = ScalarToyProblem::new(2.0, 1.0, 1.0);
        let s = toy.known_saddle().unwrap();
        let out = run_ffcr(&toy, s.clone(), &FfcrConfig::default());
        assert_eq!(out.status, FfcrStatus::Converged);
        assert_eq!(out.grad_norm_final, 0.0);
        assert_eq!(out.stages, 1);
    }

    #[test]
    fn toy_run_converges() {
        let toy = ScalarToyProblem::new(2.0, 1.0, 1.0);
        let cfg = FfcrConfig { epsilon: 1e-6, ..FfcrConfig::default() };
        let out = run_ffcr(&toy, Point::from_parts(&[0.5], &[-0.5]), &cfg);
        assert_eq!(out.status, FfcrStatus::Converged, "{:?}", out.status);
        assert!(toy.operator(&out.z_final).norm() <= 1e-6);
        for w in out.trace.windows(2) {
            assert!((w[0].t, w[0].k, w[0].sub) < (w[1].t, w[1].k, w[1].sub));
        }
    }

    #[test]
    fn invalid_config_fails() {
        let toy = ScalarToyProblem::new(2.0, 1.0, 1.0);
        let out = run_ffcr(&toy, Point::from_parts(&[0.5], &[-0.5]), &FfcrConfig { d0: 0.0, ..Default::default() });
        assert!(matches!(out.status, FfcrStatus::Failed(SolverError::InvalidConfig { name: "d0", .. })));
    }
}
