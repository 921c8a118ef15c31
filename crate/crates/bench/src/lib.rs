//! Benchmark harness for the cubic-minimax solvers: run configuration,
//! seeded experiment execution, CSV traces and multi-algorithm comparison.

pub mod compare;
pub mod config;
pub mod error;
pub mod experiment;
pub mod trace;

pub use config::{Algorithm, ConfigBuilder, ConfigError, RunConfig};
pub use error::HarnessError;
