use std::ops::Range;
use std::thread;

use serde::{Deserialize, Serialize};

use super::reduce::{reduce_deterministic, Partial};
use super::schedule::{interleave_groups, partition_indices};
use super::ExecutionStrategy;
use crate::metrics::{flop_report, measure_latency, EnergyReport, FlopReport, OpCostTable};
use crate::payoffs::{discount, payoff, Estimate, PathObservation};
use crate::simcore::{PathState, PathStepper};
use crate::task::OptionTask;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub task: String,
    pub paths: u64,
    pub steps: u32,
    pub strategy: ExecutionStrategy,
    pub seed: u64,
    /// Discounted estimate of the option value.
    pub price: f64,
    pub stderr: f64,
    /// Wall-clock seconds for map and reduce.
    pub latency: f64,
    pub flops: FlopReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyReport>,
}

impl RunResult {
    pub fn recount_flops(&mut self, task: &OptionTask, costs: &OpCostTable) -> Result<()> {
        self.flops = flop_report(task, costs)?;
        Ok(())
    }
}

/// Simulates the paths of `range`, keeping `interleave` paths in flight, and
/// returns their payload sums. Paths are folded in ascending id order.
pub fn run_range(task: &OptionTask, range: Range<u64>, interleave: usize, seed: u64) -> Result<Partial> {
    let stepper = PathStepper::new(task, seed);
    let mut partial = Partial::empty(range.clone());
    let mut slots: Vec<(PathState, PathObservation)> = Vec::with_capacity(interleave);
    for group in interleave_groups(range, interleave) {
        slots.clear();
        slots.resize(group.clone().count(), stepper.initial());
        for step in 0..task.steps {
            for (path_id, (state, obs)) in group.clone().zip(slots.iter_mut()) {
                stepper.advance(state, obs, path_id, step);
            }
        }
        for (state, obs) in &slots {
            partial.push(payoff(&task.payoff, state, obs)?);
        }
    }
    Ok(partial)
}

fn map_phase(task: &OptionTask, ranges: &[Range<u64>], interleave: usize, seed: u64) -> Result<Vec<Partial>> {
    if ranges.len() == 1 {
        return Ok(vec![run_range(task, ranges[0].clone(), interleave, seed)?]);
    }
    thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|r| {
                let r = r.clone();
                scope.spawn(move || run_range(task, r, interleave, seed))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|e| std::panic::resume_unwind(e)))
            .collect()
    })
}

/// Prices `task` under `strategy`. The price and standard error depend only
/// on `(task, seed)`.
pub fn run(task: &OptionTask, strategy: ExecutionStrategy, seed: u64) -> Result<RunResult> {
    strategy.validate()?;
    task.validate()?;
    let ranges: Vec<_> = partition_indices(task.paths, strategy.workers)?
        .into_iter()
        .filter(|r| !r.is_empty())
        .collect();
    let (reduced, latency) = measure_latency(|| -> Result<_> {
        let partials = map_phase(task, &ranges, strategy.interleave, seed)?;
        reduce_deterministic(&ranges, partials)
    });
    let reduced = reduced?;
    if reduced.count != task.paths {
        return Err(Error::IncompleteReduction(format!(
            "reduced {} of {} paths",
            reduced.count, task.paths
        )));
    }
    let est = Estimate::from_sums(&reduced.sum, &reduced.sum_sq, reduced.count)?;
    let r = task.model.rate();
    Ok(RunResult {
        task: task.designation.clone(),
        paths: task.paths,
        steps: task.steps,
        strategy,
        seed,
        price: discount(est.mean, r, task.maturity, task.valuation_time),
        stderr: discount(est.stderr, r, task.maturity, task.valuation_time),
        latency,
        flops: flop_report(task, &OpCostTable::default())?,
        energy: None,
    })
}
