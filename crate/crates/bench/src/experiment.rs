//! Running one configuration end to end.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use cubic_minimax::baselines::{run_eg, run_newton_minmax, EgStatus, NewtonMinMaxConfig};
use cubic_minimax::ffcr::{run_ffcr, FfcrPhase, FfcrStatus};
use cubic_minimax::lfcr::{run_lfcr, LfcrOutput, LfcrStatus};
use cubic_minimax::problems::{initial_point, make_cubic_bilinear, read_instance, write_instance, BSource, CubicBilinearProblem};
use cubic_minimax::{Point, SaddleOracle};
use nalgebra::DMatrix;

use crate::config::{AlgoParams, Algorithm, Granularity, ProblemSource, RunConfig};
use crate::error::HarnessError;
use crate::trace::{decimate, fmt_real, write_csv, TraceRecord};

pub fn load_problem(source: &ProblemSource) -> Result<CubicBilinearProblem, HarnessError> {
    match source {
        ProblemSource::Generated { n, rho, b_seed } => {
            Ok(make_cubic_bilinear(*n, *rho, DMatrix::identity(*n, *n), BSource::Seed(*b_seed))?)
        }
        ProblemSource::Instance(path) => {
            let file = File::open(path).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
            Ok(read_instance(BufReader::new(file))?)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub algorithm: Algorithm,
    pub status: String,
    pub failed: bool,
    /// `‖∇f‖` at the returned point, re-evaluated after the run.
    pub final_grad_norm: f64,
    pub iterations: usize,
    pub operator_evals: u64,
    pub jacobian_evals: u64,
    pub linear_solves: u64,
    pub wall_ms: f64,
    pub final_h: Option<f64>,
    pub final_m: Option<f64>,
    pub final_d: Option<f64>,
    pub stages: Option<usize>,
    /// `‖z₀ - z*‖`.
    pub initial_distance: f64,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "algorithm={}", self.algorithm)?;
        writeln!(f, "status={}", self.status)?;
        writeln!(f, "final_grad_norm={}", fmt_real(self.final_grad_norm))?;
        writeln!(f, "iterations={}", self.iterations)?;
        writeln!(f, "operator_evals={}", self.operator_evals)?;
        writeln!(f, "jacobian_evals={}", self.jacobian_evals)?;
        writeln!(f, "linear_solves={}", self.linear_solves)?;
        writeln!(f, "initial_distance={}", fmt_real(self.initial_distance))?;
        for (name, v) in [("final_h", self.final_h), ("final_m", self.final_m), ("final_d", self.final_d)] {
            if let Some(v) = v {
                writeln!(f, "{name}={}", fmt_real(v))?;
            }
        }
        if let Some(s) = self.stages {
            writeln!(f, "stages={s}")?;
        }
        writeln!(f, "wall_ms={:.3}", self.wall_ms)
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub summary: RunSummary,
    /// Full trace; decimation applies only when writing the CSV.
    pub records: Vec<TraceRecord>,
    pub z_final: Point,
}

fn initial_record(algorithm: Algorithm, grad_norm: f64) -> TraceRecord {
    TraceRecord {
        wall_ms: 0.0,
        algorithm,
        t: 0,
        k: 0,
        sub: 0,
        iter: 0,
        grad_norm,
        curvature: None,
        step_norm: None,
        lambda: None,
        operator_evals: 0,
        jacobian_evals: 0,
        linear_solves: 0,
    }
}

fn lfcr_status(status: &LfcrStatus) -> (String, bool) {
    match status {
        LfcrStatus::MaxIterations => ("max_iterations".into(), false),
        LfcrStatus::GradTolReached => ("grad_tol_reached".into(), false),
        LfcrStatus::Stationary => ("stationary".into(), false),
        LfcrStatus::Failed(e) => (format!("failed: {e}"), true),
    }
}

fn lfcr_result(algorithm: Algorithm, problem: &CubicBilinearProblem, z0: &Point, out: LfcrOutput) -> (Vec<TraceRecord>, RunSummary, Point) {
    let mut records = vec![initial_record(algorithm, problem.operator(z0).norm())];
    records.extend(out.trace.iter().map(|r| TraceRecord {
        wall_ms: r.wall_ms,
        algorithm,
        t: 0,
        k: r.k,
        sub: 0,
        iter: r.k,
        grad_norm: r.grad_norm,
        curvature: Some(r.h),
        step_norm: Some(r.step_norm),
        lambda: r.lambda,
        operator_evals: r.counts.operator,
        jacobian_evals: r.counts.jacobian,
        linear_solves: r.counts.linear_solves,
    }));
    let (status, failed) = lfcr_status(&out.status);
    let summary = RunSummary {
        algorithm,
        status,
        failed,
        final_grad_norm: problem.operator(&out.z_bar).norm(),
        iterations: out.iterations,
        operator_evals: out.counts.operator,
        jacobian_evals: out.counts.jacobian,
        linear_solves: out.counts.linear_solves,
        wall_ms: 0.0,
        final_h: Some(out.h_final),
        final_m: None,
        final_d: None,
        stages: None,
        initial_distance: 0.0,
    };
    (records, summary, out.z_bar)
}

/// Runs `config` on an already constructed problem.
pub fn execute(config: &RunConfig, problem: &CubicBilinearProblem) -> RunResult {
    let algorithm = config.algorithm();
    let z0 = initial_point(problem, config.seed);
    let started = Instant::now();
    let (records, mut summary, z_final) = match &config.params {
        AlgoParams::Lfcr(c) => lfcr_result(algorithm, problem, &z0, run_lfcr(problem, z0.clone(), c)),
        AlgoParams::NewtonMinmax { rho_known, config: c } => {
            let c = NewtonMinMaxConfig { rho: rho_known.unwrap_or(problem.rho()), ..c.clone() };
            lfcr_result(algorithm, problem, &z0, run_newton_minmax(problem, z0.clone(), &c))
        }
        AlgoParams::Eg(c) => {
            let out = run_eg(problem, z0.clone(), c);
            let records = out
                .trace
                .iter()
                .map(|r| TraceRecord {
                    wall_ms: r.wall_ms,
                    algorithm,
                    t: 0,
                    k: r.k,
                    sub: 0,
                    iter: r.k,
                    grad_norm: r.grad_norm,
                    curvature: None,
                    step_norm: Some(r.step_norm),
                    lambda: None,
                    operator_evals: r.operator_evals,
                    jacobian_evals: 0,
                    linear_solves: 0,
                })
                .collect();
            let (status, failed) = match &out.status {
                EgStatus::MaxIterations => ("max_iterations".to_string(), false),
                EgStatus::GradTolReached => ("grad_tol_reached".to_string(), false),
                EgStatus::Stationary => ("stationary".to_string(), false),
                EgStatus::Failed(e) => (format!("failed: {e}"), true),
            };
            let summary = RunSummary {
                algorithm,
                status,
                failed,
                final_grad_norm: problem.operator(&out.z_final).norm(),
                iterations: out.iterations,
                operator_evals: out.counts.operator,
                jacobian_evals: out.counts.jacobian,
                linear_solves: out.counts.linear_solves,
                wall_ms: 0.0,
                final_h: None,
                final_m: None,
                final_d: None,
                stages: None,
                initial_distance: 0.0,
            };
            (records, summary, out.z_final)
        }
        AlgoParams::Ffcr(c) => {
            let out = run_ffcr(problem, z0.clone(), c);
            let mut records = vec![initial_record(algorithm, problem.operator(&z0).norm())];
            records.extend(
                out.trace
                    .iter()
                    .filter(|r| match config.granularity {
                        Granularity::All => true,
                        Granularity::Inner => r.phase != FfcrPhase::Inner,
                        Granularity::Outer => r.phase == FfcrPhase::Stage,
                    })
                    .map(|r| TraceRecord {
                        wall_ms: r.wall_ms,
                        algorithm,
                        t: r.t,
                        k: r.k,
                        sub: r.sub,
                        iter: r.iter,
                        grad_norm: r.grad_norm,
                        curvature: Some(r.curvature),
                        step_norm: Some(r.step_norm),
                        lambda: r.lambda,
                        operator_evals: r.counts.operator,
                        jacobian_evals: r.counts.jacobian,
                        linear_solves: r.counts.linear_solves,
                    }),
            );
            let (status, failed) = match &out.status {
                FfcrStatus::Converged => ("converged".to_string(), false),
                FfcrStatus::Failed(e) => (format!("failed: {e}"), true),
            };
            let summary = RunSummary {
                algorithm,
                status,
                failed,
                final_grad_norm: out.grad_norm_final,
                iterations: out.trace.last().map_or(0, |r| r.iter),
                operator_evals: out.counts.operator,
                jacobian_evals: out.counts.jacobian,
                linear_solves: out.counts.linear_solves,
                wall_ms: 0.0,
                final_h: out.stage_outputs.last().map(|s| s.h_stage),
                final_m: Some(out.m_final),
                final_d: Some(out.d_final),
                stages: Some(out.stages),
                initial_distance: 0.0,
            };
            (records, summary, out.z_final)
        }
    };
    summary.wall_ms = started.elapsed().as_secs_f64() * 1e3;
    summary.initial_distance = z0.distance(problem.saddle());
    RunResult { summary, records, z_final }
}

/// Paths written by [`run_experiment`].
#[derive(Debug, Clone)]
pub struct Written {
    pub csv: PathBuf,
    pub instance: PathBuf,
    pub summary: PathBuf,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

fn create(path: &Path) -> Result<BufWriter<File>, HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

/// Writes the CSV trace, the instance file and the summary next to each other.
pub fn write_outputs(config: &RunConfig, problem: &CubicBilinearProblem, result: &RunResult) -> Result<Written, HarnessError> {
    let csv_path = config.trace_path();
    let instance_path = csv_path.with_extension("instance");
    let summary_path = csv_path.with_extension("summary");

    let out = create(&csv_path)?;
    write_csv(out, decimate(&result.records, config.trace_stride)).map_err(|source| HarnessError::Csv {
        path: csv_path.clone(),
        source,
    })?;

    let mut out = create(&instance_path)?;
    write_instance(problem, &mut out)?;
    out.flush().map_err(io_err(&instance_path))?;

    let mut out = create(&summary_path)?;
    write!(out, "{}", result.summary).map_err(io_err(&summary_path))?;
    out.flush().map_err(io_err(&summary_path))?;

    Ok(Written {
        csv: csv_path,
        instance: instance_path,
        summary: summary_path,
    })
}

/// Loads the problem, runs the configuration and writes every output file.
pub fn run_experiment(config: &RunConfig) -> Result<(RunResult, Written), HarnessError> {
    let problem = load_problem(&config.problem)?;
    let result = execute(config, &problem);
    let written = write_outputs(config, &problem, &result)?;
    Ok((result, written))
}
