//! Device measurements and heterogeneous workload planning.
//!
//! The planner walks the data-centre FPGA flow: receive the workload,
//! profile it against measured implementations, assess whether FPGAs should
//! be used, check implementation availability, then split paths across the
//! chosen devices and project makespan and energy.

mod assess;
mod data;
mod plan;
mod profile;
mod report;

pub use assess::{
    assess_fpga, choose_variant, Assessment, Candidate, Constraints, Objective, PlatformRank, TaskAssessment,
};
pub use data::{
    DataSources, DeviceKind, DeviceProfile, MeasurementRow, MeasurementTable, ResourceCapacity, ResourcePct, Variant,
    MEASURED_PATHS,
};
pub use plan::{
    plan_workload, simulate_heterogeneous, split_paths, Allocation, PartitionPlan, PlatformFilter, TaskDecision,
    WorkloadSpec, WorkloadTask,
};
pub use profile::{profile_workload, FlopSource, LocalExecutor, Projection, TaskProfile, WorkloadProfile};
pub use report::{report, PlatformSummary, Report};
