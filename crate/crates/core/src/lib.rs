//! Second-order solvers for unconstrained convex-concave saddle-point problems
//! `min_x max_y f(x, y)`.
//!
//! The crate provides:
//!
//! * the oracle contract ([`SaddleOracle`]) for the monotone operator
//!   `F(z) = [∇_x f; -∇_y f]` and its Jacobian, plus a proximal wrapper
//!   ([`RegularizedOracle`]);
//! * an exact solver for the cubic-regularized Newton step
//!   `F(ẑ) + DF(ẑ)(z - ẑ) + 6H‖z - ẑ‖(z - ẑ) = 0` ([`cubic`]);
//! * [`lfcr`]: a cubic-regularized extragradient method that estimates the
//!   Hessian-Lipschitz constant by backtracking;
//! * [`ffcr`]: a guess-and-check outer loop on top of `lfcr` that needs neither
//!   the Lipschitz constant nor the distance to the solution;
//! * [`baselines`]: extragradient and the known-constant cubic method;
//! * [`problems`]: benchmark instances with ground truth and a restricted-gap
//!   diagnostic.

pub mod baselines;
pub mod cubic;
pub mod error;
pub mod ffcr;
pub mod lfcr;
pub mod oracle;
pub mod point;
pub mod problems;
pub mod validate;

pub use error::SolverError;
pub use oracle::{
    grad_norm, regularize, CountedOracle, EvalCounts, GroundTruth, RegularizedOracle, SaddleOracle,
};
pub use point::{JacobianValue, OperatorValue, Point, ProblemDims};
