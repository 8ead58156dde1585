//! Desk-scale evaluation: anytime-track metrics, an exhaustive optimum for
//! small instances, random instance families and a subprocess runner.

pub mod gen;
pub mod metrics;
pub mod oracle;
pub mod runner;

pub use metrics::{mse_score, tally, BenchmarkReport, InstanceRecord, Outcome};
pub use oracle::{brute_force_optimum, TooLarge, MAX_BRUTE_FORCE_VARS};
