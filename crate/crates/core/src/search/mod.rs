//! The anytime local-search loop and its incremental bookkeeping.

mod engine;
mod select;
mod state;

pub use engine::{run, Improvement, RoundSummary, RunResult, SearchParams, TracePoint};
pub use select::{pick_bms, pick_from_falsified, NoFalsifiedClause};
pub use state::{SearchState, GOOD_SCORE_EPS};
