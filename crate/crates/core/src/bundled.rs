//! Data files shipped with the crate.

use crate::devicelab::{DataSources, MeasurementTable};
use crate::metrics::OpCostTable;
use crate::task::TaskSet;

pub const TASKS_TOML: &str = include_str!("../data/tasks.toml");
pub const COSTS_TXT: &str = include_str!("../data/costs.txt");
pub const PLATFORMS_CSV: &str = include_str!("../data/platforms.csv");
pub const COMPLEXITY_CSV: &str = include_str!("../data/tasks.csv");
pub const LATENCY_CSV: &str = include_str!("../data/latency.csv");
pub const ENERGY_CSV: &str = include_str!("../data/energy.csv");
pub const RESOURCES_CSV: &str = include_str!("../data/resources.csv");

/// The five benchmark tasks plus `bs-eu-control`.
pub fn tasks() -> TaskSet {
    TaskSet::parse(TASKS_TOML, "bundled:tasks.toml").expect("bundled tasks parse")
}

pub fn costs() -> OpCostTable {
    OpCostTable::parse(COSTS_TXT, "bundled:costs.txt").expect("bundled costs parse")
}

pub fn sources() -> DataSources {
    let named = |name: &str, text: &str| (format!("bundled:{name}"), text.to_string());
    DataSources {
        platforms: named("platforms.csv", PLATFORMS_CSV),
        tasks: named("tasks.csv", COMPLEXITY_CSV),
        latency: named("latency.csv", LATENCY_CSV),
        energy: named("energy.csv", ENERGY_CSV),
        resources: Some(named("resources.csv", RESOURCES_CSV)),
    }
}

pub fn measurements() -> MeasurementTable {
    MeasurementTable::load(&sources()).expect("bundled measurements parse")
}

/// Benchmark task designations in table order.
pub const BENCHMARK_TASKS: [&str; 5] = ["he-eu", "he-ba", "he-do", "he-di", "bl-as"];
