use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::data::{DeviceKind, MeasurementRow, Variant};
use super::profile::{Projection, WorkloadProfile};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    MinLatency,
    MinEnergy,
    MaxEfficiency,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Self::MinLatency => "min-latency",
            Self::MinEnergy => "min-energy",
            Self::MaxEfficiency => "max-efficiency",
        }
    }

    /// Lower is better. `None` when the metric is unavailable.
    fn score(self, latency: Option<f64>, energy: Option<f64>, efficiency: Option<f64>) -> Option<f64> {
        match self {
            Self::MinLatency => latency,
            Self::MinEnergy => energy,
            Self::MaxEfficiency => efficiency.map(|e| -e).or(energy),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min-latency" => Ok(Self::MinLatency),
            "min-energy" => Ok(Self::MinEnergy),
            "max-efficiency" => Ok(Self::MaxEfficiency),
            _ => Err(Error::config(format!(
                "unknown objective `{s}` (expected min-latency, min-energy or max-efficiency)"
            ))),
        }
    }
}

/// Workload-wide budget. Unset limits do not constrain.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Constraints {
    pub max_seconds: Option<f64>,
    pub max_joules: Option<f64>,
}

impl Constraints {
    pub fn admits(&self, latency: Option<f64>, energy: Option<f64>) -> bool {
        let within = |limit: Option<f64>, value: Option<f64>| match (limit, value) {
            (None, _) => true,
            (Some(l), Some(v)) => v <= l,
            (Some(_), None) => false,
        };
        within(self.max_seconds, latency) && within(self.max_joules, energy)
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if let Some(s) = self.max_seconds {
            parts.push(format!("max_seconds = {s}"));
        }
        if let Some(j) = self.max_joules {
            parts.push(format!("max_joules = {j}"));
        }
        if parts.is_empty() {
            "none".to_string()
        } else {
            parts.join(", ")
        }
    }
}

/// Best variant among one platform's rows for one task. Min-latency ranks by
/// latency; the other objectives by energy. Ties go to the earlier variant.
pub fn choose_variant(rows: &[&MeasurementRow], objective: Objective) -> Option<Variant> {
    let key = |r: &MeasurementRow| match objective {
        Objective::MinLatency => r.latency,
        Objective::MinEnergy | Objective::MaxEfficiency => r.energy,
    };
    best_by(rows.iter().filter_map(|r| key(r).map(|k| (r.variant, k))))
}

fn best_by(items: impl Iterator<Item = (Variant, f64)>) -> Option<Variant> {
    let mut best: Option<(Variant, f64)> = None;
    for (v, k) in items {
        best = match best {
            Some((bv, bk)) if bk < k || (bk == k && bv <= v) => Some((bv, bk)),
            _ => Some((v, k)),
        };
    }
    best.map(|(v, _)| v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub platform: String,
    pub kind: DeviceKind,
    pub variant: Variant,
    pub latency: Option<f64>,
    pub energy: Option<f64>,
    pub efficiency: Option<f64>,
    /// Objective score; lower ranks first.
    pub score: f64,
}

impl Candidate {
    fn from_projection(p: &Projection, score: f64) -> Self {
        Self {
            platform: p.platform.clone(),
            kind: p.kind,
            variant: p.variant,
            latency: p.latency,
            energy: p.energy,
            efficiency: p.efficiency,
            score,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskAssessment {
    pub designation: String,
    /// One entry per platform, best first.
    pub ranking: Vec<Candidate>,
    pub use_fpga: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformRank {
    pub platform: String,
    pub kind: DeviceKind,
    /// Mean over tasks of the objective metric (seconds, joules or FLOP/J).
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub objective: Objective,
    pub tasks: Vec<TaskAssessment>,
    /// Platforms that can run every task, best first.
    pub overall: Vec<PlatformRank>,
    pub use_fpga: bool,
}

fn by_score(a: &Candidate, b: &Candidate) -> Ordering {
    a.score.total_cmp(&b.score)
}

/// Ranks platforms per task under `objective`, keeping the best admissible
/// variant of each platform.
pub fn assess_fpga(profile: &WorkloadProfile, objective: Objective, constraints: &Constraints) -> Result<Assessment> {
    if profile.tasks.is_empty() {
        return Err(Error::config("empty workload profile"));
    }
    let mut tasks = Vec::with_capacity(profile.tasks.len());
    for tp in &profile.tasks {
        let mut ranking: Vec<Candidate> = Vec::new();
        let mut platforms: Vec<&str> = Vec::new();
        for p in &tp.projections {
            if !platforms.contains(&p.platform.as_str()) {
                platforms.push(&p.platform);
            }
        }
        for name in platforms {
            let best = tp
                .projections
                .iter()
                .filter(|p| p.platform == name && constraints.admits(p.latency, p.energy))
                .filter_map(|p| objective.score(p.latency, p.energy, p.efficiency).map(|s| (p, s)))
                .fold(None::<(&Projection, f64)>, |acc, (p, s)| match acc {
                    Some((bp, bs)) if bs < s || (bs == s && bp.variant <= p.variant) => Some((bp, bs)),
                    _ => Some((p, s)),
                });
            if let Some((p, s)) = best {
                ranking.push(Candidate::from_projection(p, s));
            }
        }
        if ranking.is_empty() {
            return Err(Error::Infeasible(format!(
                "no platform satisfies the constraints for task `{}` ({})",
                tp.designation,
                constraints.describe()
            )));
        }
        ranking.sort_by(by_score);
        let use_fpga = ranking[0].kind == DeviceKind::Fpga;
        tasks.push(TaskAssessment {
            designation: tp.designation.clone(),
            ranking,
            use_fpga,
        });
    }
    let overall = overall_ranking(&tasks, objective);
    let use_fpga = tasks.iter().any(|t| t.use_fpga);
    Ok(Assessment {
        objective,
        tasks,
        overall,
        use_fpga,
    })
}

fn overall_ranking(tasks: &[TaskAssessment], objective: Objective) -> Vec<PlatformRank> {
    let mut out: Vec<PlatformRank> = Vec::new();
    for c in &tasks[0].ranking {
        let mut values = Vec::with_capacity(tasks.len());
        for t in tasks {
            let Some(m) = t.ranking.iter().find(|x| x.platform == c.platform) else {
                break;
            };
            let v = match objective {
                Objective::MinLatency => m.latency,
                Objective::MinEnergy => m.energy,
                Objective::MaxEfficiency => m.efficiency,
            };
            match v {
                Some(v) => values.push(v),
                None => break,
            }
        }
        if values.len() == tasks.len() {
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            out.push(PlatformRank {
                platform: c.platform.clone(),
                kind: c.kind,
                mean,
            });
        }
    }
    match objective {
        Objective::MaxEfficiency => out.sort_by(|a, b| b.mean.total_cmp(&a.mean)),
        _ => out.sort_by(|a, b| a.mean.total_cmp(&b.mean)),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::devicelab::{profile_workload, FlopSource, WorkloadSpec, WorkloadTask};

    fn row(variant: Variant, latency: f64, energy: f64) -> MeasurementRow {
        MeasurementRow {
            platform: "X".into(),
            task: "t".into(),
            variant,
            latency: Some(latency),
            energy: Some(energy),
            resource_pct: None,
        }
    }

    #[test]
    fn choose_variant_examples() {
        let t = bundled::measurements();
        let p385 = t.rows_for("P385-D5", "he-eu");
        assert_eq!(choose_variant(&p385, Objective::MinLatency), Some(Variant::Pp));
        let max3 = t.rows_for("Max3", "he-eu");
        assert_eq!(choose_variant(&max3, Objective::MinLatency), Some(Variant::Tp));
    }

    #[test]
    fn ties_prefer_declaration_order() {
        let rows = [
            row(Variant::Pp, 1.0, 1.0),
            row(Variant::Tp, 1.0, 1.0),
            row(Variant::Base, 1.0, 1.0),
        ];
        let refs: Vec<&MeasurementRow> = rows.iter().collect();
        for o in [Objective::MinLatency, Objective::MinEnergy, Objective::MaxEfficiency] {
            assert_eq!(choose_variant(&refs, o), Some(Variant::Base));
        }
        assert_eq!(choose_variant(&[], Objective::MinEnergy), None);
    }

    #[test]
    fn objective_parsing_round_trips() {
        for o in [Objective::MinLatency, Objective::MinEnergy, Objective::MaxEfficiency] {
            assert_eq!(o.name().parse::<Objective>().unwrap(), o);
        }
        assert!(matches!("fastest".parse::<Objective>(), Err(Error::Config(_))));
    }

    fn assess(designations: &[&str], objective: Objective, c: Constraints) -> Result<Assessment> {
        let t = bundled::measurements();
        let w = WorkloadSpec::new(designations.iter().map(|d| WorkloadTask::new(*d, 10_000_000)).collect());
        let p = profile_workload(&w, &t, FlopSource::Published, None)?;
        assess_fpga(&p, objective, &c)
    }

    #[test]
    fn min_latency_he_eu_prefers_the_gpu() {
        let a = assess(&["he-eu"], Objective::MinLatency, Constraints::default()).unwrap();
        let top = &a.tasks[0].ranking[0];
        assert_eq!(top.platform, "W5000");
        assert_eq!(top.latency, Some(8.0));
        assert!(!a.tasks[0].use_fpga);
        assert!(!a.use_fpga);
    }

    #[test]
    fn min_energy_he_ba_prefers_p385_pp() {
        let a = assess(&["he-ba"], Objective::MinEnergy, Constraints::default()).unwrap();
        let top = &a.tasks[0].ranking[0];
        assert_eq!((top.platform.as_str(), top.variant), ("P385-D5", Variant::Pp));
        assert_eq!(top.energy, Some(1900.0));
        assert!(a.use_fpga);
    }

    #[test]
    fn max_efficiency_over_all_tasks_prefers_p385() {
        let a = assess(
            &bundled::BENCHMARK_TASKS,
            Objective::MaxEfficiency,
            Constraints::default(),
        )
        .unwrap();
        assert_eq!(a.overall[0].platform, "P385-D5");
        assert_eq!(a.overall.len(), 7);
        for t in &a.tasks {
            let p = t.ranking.iter().find(|c| c.platform == "P385-D5").unwrap();
            assert_eq!(p.variant, Variant::Pp);
        }
    }

    #[test]
    fn constraints_filter_and_can_make_the_workload_infeasible() {
        let c = Constraints {
            max_seconds: Some(10.0),
            max_joules: None,
        };
        let a = assess(&["he-eu"], Objective::MinEnergy, c).unwrap();
        assert!(a.tasks[0].ranking.iter().all(|x| x.latency.unwrap() <= 10.0));
        assert_eq!(a.tasks[0].ranking[0].platform, "W5000");

        let c = Constraints {
            max_seconds: Some(1.0),
            max_joules: None,
        };
        assert!(matches!(
            assess(&["he-eu"], Objective::MinLatency, c),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn constraint_admission() {
        let c = Constraints {
            max_seconds: Some(5.0),
            max_joules: Some(10.0),
        };
        assert!(c.admits(Some(5.0), Some(10.0)));
        assert!(!c.admits(Some(5.1), Some(1.0)));
        assert!(!c.admits(None, Some(1.0)));
        assert!(Constraints::default().admits(None, None));
    }
}
