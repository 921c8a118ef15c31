use thiserror::Error;

/// Runtime failures of the subproblem solver and the outer algorithms.
///
/// Contract violations (dimension mismatches, negative weights) panic instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("secular equation did not converge after {iterations} iterations (bracket [{lo:e}, {hi:e}])")]
    SecularNonConvergence { iterations: usize, lo: f64, hi: f64 },

    #[error("shifted system J + θI is singular for θ = {theta:e}")]
    SingularSystem { theta: f64 },

    #[error("backtracking exceeded {cap} doublings (last estimate {last_estimate:e})")]
    BacktrackFailed { cap: usize, last_estimate: f64 },

    #[error("cubic step has zero length although the operator norm is {operator_norm:e}")]
    DegenerateStep { operator_norm: f64 },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("invalid parameter {name}: {reason}")]
    InvalidConfig { name: &'static str, reason: String },

    #[error("no stage reached the target after {stages} outer iterations (best gradient norm {best_grad_norm:e})")]
    MaxOuterExceeded { stages: usize, best_grad_norm: f64 },
}
