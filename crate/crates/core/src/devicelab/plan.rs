use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::assess::{assess_fpga, Constraints, Objective};
use super::data::{DeviceKind, MeasurementTable, Variant};
use super::profile::{profile_workload, FlopSource, LocalExecutor, Projection};
use crate::task::PAPER_SCALE_PATHS;
use crate::text::line_of;
use crate::{Error, Result};

/// Restricts a task to one platform, optionally to one variant of it.
/// Written `platform` or `platform:variant`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PlatformFilter {
    pub platform: String,
    pub variant: Option<Variant>,
}

impl PlatformFilter {
    fn matches(&self, p: &Projection) -> bool {
        p.platform == self.platform && self.variant.is_none_or(|v| v == p.variant)
    }
}

impl FromStr for PlatformFilter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (platform, variant) = match s.split_once(':') {
            Some((p, v)) => (p, Some(v.parse()?)),
            None => (s, None),
        };
        if platform.is_empty() {
            return Err(Error::config(format!("empty platform in filter `{s}`")));
        }
        Ok(Self {
            platform: platform.to_string(),
            variant,
        })
    }
}

impl TryFrom<String> for PlatformFilter {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PlatformFilter> for String {
    fn from(f: PlatformFilter) -> String {
        f.to_string()
    }
}

impl fmt::Display for PlatformFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.variant {
            Some(v) => write!(f, "{}:{v}", self.platform),
            None => f.write_str(&self.platform),
        }
    }
}

fn default_paths() -> u64 {
    PAPER_SCALE_PATHS
}

fn one() -> u64 {
    1
}

fn one_device() -> usize {
    1
}

fn default_objective() -> Objective {
    Objective::MaxEfficiency
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadTask {
    pub designation: String,
    #[serde(default = "default_paths")]
    pub paths: u64,
    #[serde(default = "one")]
    pub repeat: u64,
    /// Empty means every platform.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub platforms: Vec<PlatformFilter>,
}

impl WorkloadTask {
    pub fn new(designation: impl Into<String>, paths: u64) -> Self {
        Self {
            designation: designation.into(),
            paths,
            repeat: 1,
            platforms: Vec::new(),
        }
    }

    pub fn with_platforms(mut self, platforms: Vec<PlatformFilter>) -> Self {
        self.platforms = platforms;
        self
    }

    pub fn total_paths(&self) -> Result<u64> {
        if self.paths == 0 || self.repeat == 0 {
            return Err(Error::config(format!(
                "task `{}` needs paths >= 1 and repeat >= 1",
                self.designation
            )));
        }
        self.paths
            .checked_mul(self.repeat)
            .ok_or_else(|| Error::config(format!("task `{}`: paths x repeat overflows", self.designation)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadSpec {
    #[serde(default = "default_objective")]
    pub objective: Objective,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_seconds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_joules: Option<f64>,
    /// Upper bound on devices sharing one task.
    #[serde(default = "one_device")]
    pub max_devices: usize,
    #[serde(rename = "task", default)]
    pub tasks: Vec<WorkloadTask>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local: Option<LocalExecutor>,
}

impl WorkloadSpec {
    pub fn new(tasks: Vec<WorkloadTask>) -> Self {
        Self {
            objective: default_objective(),
            max_seconds: None,
            max_joules: None,
            max_devices: 1,
            tasks,
            local: None,
        }
    }

    pub fn single(task: WorkloadTask) -> Self {
        Self::new(vec![task])
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }

    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let w: WorkloadSpec = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(0);
            Error::parse(source, line, e.message().to_string())
        })?;
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tasks.is_empty() {
            return Err(Error::config("workload has no tasks"));
        }
        if self.max_devices == 0 {
            return Err(Error::config("max_devices must be at least 1"));
        }
        for (name, limit) in [("max_seconds", self.max_seconds), ("max_joules", self.max_joules)] {
            if limit.is_some_and(|l| l.is_nan() || l <= 0.0) {
                return Err(Error::config(format!("{name} must be positive")));
            }
        }
        for t in &self.tasks {
            t.total_paths()?;
        }
        Ok(())
    }

    pub fn constraints(&self) -> Constraints {
        Constraints {
            max_seconds: self.max_seconds,
            max_joules: self.max_joules,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub platform: String,
    pub kind: DeviceKind,
    pub variant: Variant,
    pub paths: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskDecision {
    pub designation: String,
    pub paths: u64,
    pub allocations: Vec<Allocation>,
    pub makespan: f64,
    /// Joules.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionPlan {
    pub objective: Objective,
    pub use_fpga: bool,
    pub decisions: Vec<TaskDecision>,
    /// Tasks run one after another, so this is the sum of task makespans.
    pub projected_makespan: f64,
    /// Joules.
    pub projected_energy: f64,
    pub rationale: Vec<String>,
}

/// Splits `n` paths in proportion to `throughputs` using largest-remainder
/// rounding. Ties in the remainder go to the earlier device.
pub fn split_paths(n: u64, throughputs: &[f64]) -> Result<Vec<u64>> {
    if throughputs.is_empty() {
        return Err(Error::config("no devices to split paths across"));
    }
    if let Some(t) = throughputs.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(Error::config(format!(
            "device throughput must be positive and finite, got {t}"
        )));
    }
    let total: f64 = throughputs.iter().sum();
    let quotas: Vec<f64> = throughputs.iter().map(|t| n as f64 * (t / total)).collect();
    let mut shares: Vec<u64> = quotas.iter().map(|q| (q.floor() as u64).min(n)).collect();
    let frac = |i: usize| quotas[i] - shares[i] as f64;
    let mut order: Vec<usize> = (0..throughputs.len()).collect();
    order.sort_by(|&a, &b| frac(b).total_cmp(&frac(a)).then(a.cmp(&b)));
    let mut assigned: u64 = shares.iter().sum();
    // Floating-point floors can overshoot by a path or two on huge `n`.
    for &i in order.iter().rev().cycle() {
        if assigned <= n {
            break;
        }
        if shares[i] > 0 {
            shares[i] -= 1;
            assigned -= 1;
        }
    }
    for &i in order.iter().cycle() {
        if assigned >= n {
            break;
        }
        shares[i] += 1;
        assigned += 1;
    }
    Ok(shares)
}

struct DeviceModel {
    throughput: f64,
    active_watts: f64,
    idle_watts: f64,
}

fn device_model(
    a: &Allocation,
    task: &str,
    table: &MeasurementTable,
    local: Option<&LocalExecutor>,
) -> Result<DeviceModel> {
    if let Some(l) = local.filter(|l| l.name == a.platform) {
        return Ok(DeviceModel {
            throughput: l.throughput,
            active_watts: l.watts,
            idle_watts: 0.0,
        });
    }
    let missing = || Error::PlanIntegrity(format!("no measurement for {} {} on `{task}`", a.platform, a.variant));
    let row = table.get(&a.platform, task, a.variant).ok_or_else(missing)?;
    let (Some(latency), Some(joules)) = (row.latency, row.energy_joules()) else {
        return Err(missing());
    };
    if latency.is_nan() || latency <= 0.0 {
        return Err(missing());
    }
    let profile = table.platform(&a.platform).ok_or_else(missing)?;
    Ok(DeviceModel {
        throughput: table.measured_paths as f64 / latency,
        active_watts: joules / latency,
        idle_watts: profile.idle_watts,
    })
}

fn simulate_task(d: &TaskDecision, table: &MeasurementTable, local: Option<&LocalExecutor>) -> Result<(f64, f64)> {
    let allocated: u64 = d.allocations.iter().map(|a| a.paths).sum();
    if allocated != d.paths {
        return Err(Error::PlanIntegrity(format!(
            "task `{}` allocates {allocated} of {} paths",
            d.designation, d.paths
        )));
    }
    let mut busy = Vec::with_capacity(d.allocations.len());
    for a in &d.allocations {
        let m = device_model(a, &d.designation, table, local)?;
        busy.push((a.paths as f64 / m.throughput, m));
    }
    let makespan = busy.iter().map(|(b, _)| *b).fold(0.0, f64::max);
    let energy = busy
        .iter()
        .map(|(b, m)| m.active_watts * b + m.idle_watts * (makespan - b))
        .sum();
    Ok((makespan, energy))
}

/// Projects a plan against the measured model. Tasks run sequentially; within
/// a task every allocated device starts together and idles once done.
pub fn simulate_heterogeneous(
    plan: &PartitionPlan,
    table: &MeasurementTable,
    local: Option<&LocalExecutor>,
) -> Result<(f64, f64)> {
    let mut makespan = 0.0;
    let mut energy = 0.0;
    for d in &plan.decisions {
        let (m, e) = simulate_task(d, table, local)?;
        makespan += m;
        energy += e;
    }
    Ok((makespan, energy))
}

fn objective_value(objective: Objective, makespan: f64, energy: f64) -> f64 {
    match objective {
        Objective::MinLatency => makespan,
        // Work is fixed per task, so the most FLOP/J is the least energy.
        Objective::MinEnergy | Objective::MaxEfficiency => energy,
    }
}

fn describe_allocations(allocations: &[Allocation]) -> String {
    allocations
        .iter()
        .map(|a| format!("{} {} ({} paths)", a.platform, a.variant, a.paths))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Walks the planning flow for a workload and returns the chosen split with
/// its decision trace.
pub fn plan_workload(w: &WorkloadSpec, table: &MeasurementTable, flops: FlopSource<'_>) -> Result<PartitionPlan> {
    w.validate()?;
    let local = w.local.as_ref();
    if let Some(l) = local {
        if table.platform(&l.name).is_some() {
            return Err(Error::config(format!(
                "local executor name `{}` clashes with a platform",
                l.name
            )));
        }
    }
    let constraints = w.constraints();
    let mut trace = vec![format!(
        "receive: {} task(s), objective {}, constraints {}",
        w.tasks.len(),
        w.objective,
        constraints.describe()
    )];

    let mut profile = profile_workload(w, table, flops, local)?;
    trace.push(format!(
        "profile: {}",
        profile
            .tasks
            .iter()
            .map(|t| format!(
                "{} {} paths {:.4e} FLOP {} implementations",
                t.designation,
                t.paths,
                t.total_flops,
                t.projections.len()
            ))
            .collect::<Vec<_>>()
            .join("; ")
    ));

    let mut excluded: Vec<String> = Vec::new();
    for (wt, tp) in w.tasks.iter().zip(profile.tasks.iter_mut()) {
        if wt.platforms.is_empty() {
            continue;
        }
        let mut missing = Vec::new();
        for f in &wt.platforms {
            let known = table.platform(&f.platform).is_some() || local.is_some_and(|l| l.name == f.platform);
            if !known {
                return Err(Error::config(format!("unknown platform `{}` in workload", f.platform)));
            }
            if !tp.projections.iter().any(|p| f.matches(p)) {
                missing.push(f.to_string());
            }
        }
        tp.projections.retain(|p| wt.platforms.iter().any(|f| f.matches(p)));
        if tp.projections.is_empty() {
            return Err(Error::Infeasible(format!(
                "no available implementation for task `{}`: {} unavailable",
                wt.designation,
                missing.join(", ")
            )));
        }
        if !missing.is_empty() {
            excluded.push(format!(
                "implement: {}: {} unavailable: excluded",
                wt.designation,
                missing.join(", ")
            ));
        }
    }

    let assessment = assess_fpga(&profile, w.objective, &constraints)?;
    let best = assessment
        .tasks
        .iter()
        .map(|t| {
            format!(
                "{} -> {} {}",
                t.designation, t.ranking[0].platform, t.ranking[0].variant
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    trace.push(if assessment.use_fpga {
        format!("assess: FPGA selected; best {best}")
    } else {
        format!("assess: FPGA not selected; best {best}")
    });

    if assessment.use_fpga {
        trace.push(format!(
            "check availability: {}",
            assessment
                .tasks
                .iter()
                .map(|t| {
                    let fpgas = t.ranking.iter().filter(|c| c.kind == DeviceKind::Fpga).count();
                    format!("{} has {fpgas} FPGA implementation(s)", t.designation)
                })
                .collect::<Vec<_>>()
                .join("; ")
        ));
        for t in &assessment.tasks {
            let absent: Vec<String> = table
                .platforms()
                .iter()
                .filter(|p| p.kind == DeviceKind::Fpga)
                .flat_map(|p| Variant::ALL.iter().map(move |v| (p, *v)))
                .filter(|(p, v)| table.get(&p.name, &t.designation, *v).is_none())
                .map(|(p, v)| format!("{} {v}", p.name))
                .collect();
            if !absent.is_empty() {
                trace.push(format!(
                    "implement: {}: {} unavailable: excluded",
                    t.designation,
                    absent.join(", ")
                ));
            }
        }
    }
    trace.extend(excluded);

    let mut decisions = Vec::with_capacity(assessment.tasks.len());
    for (t, tp) in assessment.tasks.iter().zip(&profile.tasks) {
        let runnable: Vec<_> = t
            .ranking
            .iter()
            .filter(|c| c.latency.is_some_and(|l| l > 0.0) && c.energy.is_some())
            .collect();
        if runnable.is_empty() {
            return Err(Error::Infeasible(format!(
                "task `{}` has no implementation with both latency and energy measured",
                t.designation
            )));
        }
        let mut chosen: Option<(f64, TaskDecision)> = None;
        for k in 1..=w.max_devices.min(runnable.len()) {
            let devices = &runnable[..k];
            let throughputs: Vec<f64> = devices.iter().map(|c| tp.paths as f64 / c.latency.unwrap()).collect();
            let shares = split_paths(tp.paths, &throughputs)?;
            let allocations: Vec<Allocation> = devices
                .iter()
                .zip(shares)
                .filter(|(_, n)| *n > 0)
                .map(|(c, paths)| Allocation {
                    platform: c.platform.clone(),
                    kind: c.kind,
                    variant: c.variant,
                    paths,
                })
                .collect();
            let mut d = TaskDecision {
                designation: t.designation.clone(),
                paths: tp.paths,
                allocations,
                makespan: 0.0,
                energy: 0.0,
            };
            let (m, e) = simulate_task(&d, table, local)?;
            d.makespan = m;
            d.energy = e;
            let v = objective_value(w.objective, m, e);
            if chosen.as_ref().is_none_or(|(best, _)| v < *best) {
                chosen = Some((v, d));
            }
        }
        decisions.push(chosen.expect("at least one device").1);
    }

    let projected_makespan: f64 = decisions.iter().map(|d| d.makespan).sum();
    let projected_energy: f64 = decisions.iter().map(|d| d.energy).sum();
    if let Some(limit) = w.max_seconds.filter(|&l| projected_makespan > l) {
        return Err(Error::Infeasible(format!(
            "projected makespan {projected_makespan:.3} s exceeds max_seconds = {limit}"
        )));
    }
    if let Some(limit) = w.max_joules.filter(|&l| projected_energy > l) {
        return Err(Error::Infeasible(format!(
            "projected energy {projected_energy:.1} J exceeds max_joules = {limit}"
        )));
    }

    let on_fpga = decisions
        .iter()
        .flat_map(|d| &d.allocations)
        .any(|a| a.kind == DeviceKind::Fpga);
    trace.push(format!(
        "{}: {}",
        if on_fpga {
            "execute on CPU/GPU/FPGA"
        } else {
            "execute on CPU/GPU"
        },
        decisions
            .iter()
            .map(|d| format!("{} -> {}", d.designation, describe_allocations(&d.allocations)))
            .collect::<Vec<_>>()
            .join("; ")
    ));
    trace.push(format!(
        "return: makespan {projected_makespan:.3} s, energy {projected_energy:.1} J"
    ));

    Ok(PartitionPlan {
        objective: w.objective,
        use_fpga: assessment.use_fpga,
        decisions,
        projected_makespan,
        projected_energy,
        rationale: trace,
    })
}
