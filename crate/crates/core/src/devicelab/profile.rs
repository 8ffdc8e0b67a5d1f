use serde::{Deserialize, Serialize};

use super::data::{DeviceKind, MeasurementTable, Variant};
use super::plan::WorkloadSpec;
use crate::metrics::{flops_per_sim, OpCostTable};
use crate::task::TaskSet;
use crate::{Error, Result};

/// Where per-simulation FLOP counts come from.
#[derive(Debug, Clone, Copy)]
pub enum FlopSource<'a> {
    /// The dataset's published complexity column.
    Published,
    /// The static cost model applied to task definitions at `steps` path points.
    Model {
        tasks: &'a TaskSet,
        costs: &'a OpCostTable,
        steps: u32,
    },
}

impl FlopSource<'_> {
    pub fn per_sim(&self, table: &MeasurementTable, designation: &str) -> Result<u64> {
        match self {
            FlopSource::Published => table
                .complexity(designation)
                .ok_or_else(|| Error::config(format!("no published complexity for `{designation}`"))),
            FlopSource::Model { tasks, costs, steps } => {
                let task = tasks.resolve(designation)?.clone().with_steps(*steps);
                flops_per_sim(&task, costs)
            }
        }
    }
}

/// A locally measured executor usable for any task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalExecutor {
    #[serde(default = "local_name")]
    pub name: String,
    /// Paths per second.
    pub throughput: f64,
    pub watts: f64,
}

fn local_name() -> String {
    "local".to_string()
}

/// Projected cost of one task on one platform variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub platform: String,
    pub kind: DeviceKind,
    pub variant: Variant,
    pub latency: Option<f64>,
    /// Joules.
    pub energy: Option<f64>,
    /// FLOP per joule.
    pub efficiency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskProfile {
    pub designation: String,
    /// Paths across all repeats.
    pub paths: u64,
    pub flop_per_sim: u64,
    pub total_flops: f64,
    pub projections: Vec<Projection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadProfile {
    pub tasks: Vec<TaskProfile>,
}

/// Projects every task onto every measured platform variant, scaling the
/// measured latency and energy linearly in the number of paths.
pub fn profile_workload(
    w: &WorkloadSpec,
    table: &MeasurementTable,
    flops: FlopSource<'_>,
    local: Option<&LocalExecutor>,
) -> Result<WorkloadProfile> {
    if w.tasks.is_empty() {
        return Err(Error::config("workload has no tasks"));
    }
    let mut tasks = Vec::with_capacity(w.tasks.len());
    for wt in &w.tasks {
        let paths = wt.total_paths()?;
        let scale = paths as f64 / table.measured_paths as f64;
        let mut projections = Vec::new();
        for p in table.platforms() {
            for row in table.rows_for(&p.name, &wt.designation) {
                projections.push(Projection {
                    platform: p.name.clone(),
                    kind: p.kind,
                    variant: row.variant,
                    latency: row.latency.map(|l| l * scale),
                    energy: row.energy_joules().map(|e| e * scale),
                    efficiency: None,
                });
            }
        }
        if let Some(l) = local {
            if !(l.throughput > 0.0 && l.watts >= 0.0) {
                return Err(Error::config("local executor needs throughput > 0 and watts >= 0"));
            }
            let latency = paths as f64 / l.throughput;
            projections.push(Projection {
                platform: l.name.clone(),
                kind: DeviceKind::Cpu,
                variant: Variant::Base,
                latency: Some(latency),
                energy: Some(l.watts * latency),
                efficiency: None,
            });
        }
        if projections.is_empty() {
            return Err(Error::UnprofileableTask(wt.designation.clone()));
        }
        let flop_per_sim = flops.per_sim(table, &wt.designation)?;
        let total_flops = flop_per_sim as f64 * paths as f64;
        for p in &mut projections {
            p.efficiency = p.energy.filter(|&e| e > 0.0).map(|e| total_flops / e);
        }
        tasks.push(TaskProfile {
            designation: wt.designation.clone(),
            paths,
            flop_per_sim,
            total_flops,
            projections,
        });
    }
    Ok(WorkloadProfile { tasks })
}
