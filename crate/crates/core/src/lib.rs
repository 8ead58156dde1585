//! Anytime stochastic local search for partial and weighted partial MaxSAT.
//!
//! The solver restarts from decimation-built assignments, flips variables
//! chosen by best-from-multiple-selections among improving moves, and
//! escapes local optima with a clause-weighting scheme that treats
//! unweighted and weighted instances differently.

pub mod bench;
pub mod cli;
pub mod decimation;
pub mod formula;
mod index_set;
pub mod search;
pub mod wcnf;
pub mod weighting;

pub use formula::{Assignment, Clause, ClauseKind, Cost, Formula, InstanceKind, Lit, Var};
pub use index_set::IndexSet;
