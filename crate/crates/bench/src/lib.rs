//! Benchmark problems, configuration, artifact output and the acceptance
//! suite for `darcyflow`.

pub mod acceptance;
pub mod config;
pub mod error;
pub mod problems;
pub mod run;

pub use config::ProblemSpec;
pub use error::{BenchError, BenchResult};
