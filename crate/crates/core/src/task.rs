//! Benchmark task definitions and the TOML task file.
//!
//! ```toml
//! [[task]]
//! designation = "he-eu"
//! maturity = 1.0
//! valuation_time = 0.0
//! paths = 100000
//! steps = 512
//! model = { kind = "heston", s0 = 100.0, v0 = 0.04, kappa = 2.0, theta = 0.04, xi = 0.3, rho = -0.7, r = 0.05 }
//! payoff = { kind = "european-call", strike = 100.0 }
//! ```

use serde::{Deserialize, Serialize};

use crate::payoffs::PayoffSpec;
use crate::simcore::Model;
use crate::text::line_of;
use crate::{Error, Result};

/// Path and step counts of the published measurements.
pub const PAPER_SCALE_PATHS: u64 = 10_000_000;
pub const PAPER_SCALE_STEPS: u32 = 4096;
/// CI-friendly defaults.
pub const DESK_SCALE_PATHS: u64 = 100_000;
pub const DESK_SCALE_STEPS: u32 = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionTask {
    pub designation: String,
    pub model: Model,
    pub payoff: PayoffSpec,
    pub maturity: f64,
    #[serde(default)]
    pub valuation_time: f64,
    #[serde(default = "default_paths")]
    pub paths: u64,
    #[serde(default = "default_steps")]
    pub steps: u32,
}

fn default_paths() -> u64 {
    DESK_SCALE_PATHS
}

fn default_steps() -> u32 {
    DESK_SCALE_STEPS
}

impl OptionTask {
    pub fn validate(&self) -> Result<()> {
        let name = &self.designation;
        if name.trim().is_empty() {
            return Err(Error::config("task designation must not be empty"));
        }
        self.model.validate()?;
        self.payoff.validate()?;
        if !(self.maturity.is_finite() && self.valuation_time.is_finite()) {
            return Err(Error::config(format!("{name}: times must be finite")));
        }
        if self.valuation_time > self.maturity {
            return Err(Error::config(format!(
                "{name}: valuation time {} is after maturity {}",
                self.valuation_time, self.maturity
            )));
        }
        if self.steps > 0 && self.horizon() <= 0.0 {
            return Err(Error::config(format!("{name}: stepping needs a positive horizon")));
        }
        if self.paths == 0 {
            return Err(Error::config(format!("{name}: paths must be >= 1")));
        }
        Ok(())
    }

    /// Simulated horizon `T - t`.
    pub fn horizon(&self) -> f64 {
        self.maturity - self.valuation_time
    }

    /// Uniform grid spacing; zero when there are no steps.
    pub fn dt(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.horizon() / f64::from(self.steps)
        }
    }

    pub fn with_paths(mut self, paths: u64) -> Self {
        self.paths = paths;
        self
    }

    pub fn with_steps(mut self, steps: u32) -> Self {
        self.steps = steps;
        self
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskFile {
    #[serde(default)]
    task: Vec<OptionTask>,
}

/// An ordered set of named tasks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TaskSet {
    tasks: Vec<OptionTask>,
}

impl TaskSet {
    /// Parses and validates a TOML task file. `source` names the input in
    /// error messages.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let file: TaskFile = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(0);
            Error::parse(source, line, e.message().to_string())
        })?;
        let mut set = TaskSet::default();
        for task in file.task {
            task.validate()?;
            if set.get(&task.designation).is_some() {
                return Err(Error::config(format!("duplicate task `{}`", task.designation)));
            }
            set.tasks.push(task);
        }
        Ok(set)
    }

    pub fn get(&self, designation: &str) -> Option<&OptionTask> {
        self.tasks.iter().find(|t| t.designation == designation)
    }

    pub fn resolve(&self, designation: &str) -> Result<&OptionTask> {
        self.get(designation)
            .ok_or_else(|| Error::UnknownTask(designation.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &OptionTask> {
        self.tasks.iter()
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn to_toml(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            task: &'a [OptionTask],
        }
        toml::to_string(&Out { task: &self.tasks }).expect("tasks serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoffs::PayoffKind;

    const ONE: &str = r#"
[[task]]
designation = "demo"
maturity = 1.0
paths = 10
steps = 4
model = { kind = "gbm", s0 = 100.0, sigma = 0.2, r = 0.05 }
payoff = { kind = "european-call", strike = 100.0 }
"#;

    #[test]
    fn parses_with_defaults() {
        let set = TaskSet::parse(ONE, "inline").unwrap();
        let t = set.resolve("demo").unwrap();
        assert_eq!(t.valuation_time, 0.0);
        assert_eq!(t.payoff.kind, PayoffKind::EuropeanCall);
        assert_eq!(t.payoff.digital_amount, 1.0);
        assert_eq!(t.dt(), 0.25);
    }

    #[test]
    fn round_trips_through_toml() {
        let set = TaskSet::parse(ONE, "inline").unwrap();
        assert_eq!(TaskSet::parse(&set.to_toml(), "again").unwrap(), set);
    }

    #[test]
    fn unknown_task() {
        let set = TaskSet::parse(ONE, "inline").unwrap();
        assert!(matches!(set.resolve("nope"), Err(Error::UnknownTask(_))));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = ONE.replace("paths = 10", "paths = \"ten\"");
        match TaskSet::parse(&bad, "tasks.toml").unwrap_err() {
            Error::Parse { location, .. } => {
                assert_eq!(location.source, "tasks.toml");
                assert_eq!(location.line, 5);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn rejects_invalid_records() {
        let cases = [
            ONE.replace("maturity = 1.0", "maturity = 1.0\nvaluation_time = 2.0"),
            ONE.replace("paths = 10", "paths = 0"),
            ONE.replace("strike = 100.0", "strike = -1.0"),
            ONE.replace("sigma = 0.2", "sigma = -0.2"),
            format!("{ONE}{ONE}"),
        ];
        for text in cases {
            assert!(matches!(TaskSet::parse(&text, "x"), Err(Error::Config(_))), "{text}");
        }
        assert!(matches!(
            TaskSet::parse(&ONE.replace("gbm", "levy"), "x"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn zero_steps_allows_zero_horizon() {
        let text = ONE
            .replace("steps = 4", "steps = 0")
            .replace("maturity = 1.0", "maturity = 0.0");
        assert!(TaskSet::parse(&text, "x").is_ok());
    }
}
