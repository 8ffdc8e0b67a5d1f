//! Map/reduce Monte Carlo executor.
//!
//! The map phase simulates paths over disjoint index ranges and returns only
//! per-range moment sums; the reduce phase combines them in range order.
//! Draws are keyed by path id and the sums are exact, so every strategy and
//! every worker count yields the same bits.

mod exact;
mod reduce;
mod run;
mod schedule;
mod strategy;

pub use exact::ExactSum;
pub use reduce::{reduce_deterministic, Partial, Reduced};
pub use run::{run, run_range, RunResult};
pub use schedule::{interleave_groups, interleave_schedule, partition_indices, WorkItem};
pub use strategy::{ExecutionStrategy, Mode};
