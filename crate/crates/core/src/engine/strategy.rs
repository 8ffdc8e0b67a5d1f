use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Baseline,
    TaskParallel,
    PipelineParallel,
    Combined,
}

/// How the map phase is scheduled: `workers` ranges run concurrently and
/// each keeps `interleave` paths in flight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExecutionStrategy {
    pub mode: Mode,
    pub workers: usize,
    pub interleave: usize,
}

impl ExecutionStrategy {
    pub const BASELINE: Self = Self {
        mode: Mode::Baseline,
        workers: 1,
        interleave: 1,
    };

    pub fn task_parallel(workers: usize) -> Self {
        Self {
            mode: Mode::TaskParallel,
            workers,
            interleave: 1,
        }
    }

    pub fn pipeline_parallel(interleave: usize) -> Self {
        Self {
            mode: Mode::PipelineParallel,
            workers: 1,
            interleave,
        }
    }

    pub fn combined(workers: usize, interleave: usize) -> Self {
        Self {
            mode: Mode::Combined,
            workers,
            interleave,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 || self.interleave == 0 {
            return Err(Error::config(format!("{self}: workers and interleave must be >= 1")));
        }
        let ok = match self.mode {
            Mode::Baseline => self.workers == 1 && self.interleave == 1,
            Mode::TaskParallel => self.interleave == 1,
            Mode::PipelineParallel => self.workers == 1,
            Mode::Combined => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!(
                "invalid strategy: {:?} with workers={} interleave={}",
                self.mode, self.workers, self.interleave
            )))
        }
    }
}

impl fmt::Display for ExecutionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            Mode::Baseline => write!(f, "baseline"),
            Mode::TaskParallel => write!(f, "tp:{}", self.workers),
            Mode::PipelineParallel => write!(f, "pp:{}", self.interleave),
            Mode::Combined => write!(f, "combined:{},{}", self.workers, self.interleave),
        }
    }
}

fn count(text: &str, what: &str) -> Result<usize> {
    let n: usize = text
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("invalid {what} count `{text}`")))?;
    if n == 0 {
        return Err(Error::config(format!("{what} count must be >= 1")));
    }
    Ok(n)
}

/// `baseline | tp:P | pp:U | combined:P,U`
impl FromStr for ExecutionStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let strategy = match s.split_once(':') {
            None if s == "baseline" => Self::BASELINE,
            Some(("tp", p)) => Self::task_parallel(count(p, "worker")?),
            Some(("pp", u)) => Self::pipeline_parallel(count(u, "interleave")?),
            Some(("combined", rest)) => {
                let (p, u) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::config(format!("combined strategy needs `P,U`, got `{rest}`")))?;
                Self::combined(count(p, "worker")?, count(u, "interleave")?)
            }
            _ => return Err(Error::config(format!("unknown strategy `{s}`"))),
        };
        strategy.validate()?;
        Ok(strategy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(
            "baseline".parse::<ExecutionStrategy>().unwrap(),
            ExecutionStrategy::BASELINE
        );
        assert_eq!(
            "tp:8".parse::<ExecutionStrategy>().unwrap(),
            ExecutionStrategy::task_parallel(8)
        );
        assert_eq!(
            "pp:4".parse::<ExecutionStrategy>().unwrap(),
            ExecutionStrategy::pipeline_parallel(4)
        );
        assert_eq!(
            "combined:4,2".parse::<ExecutionStrategy>().unwrap(),
            ExecutionStrategy::combined(4, 2)
        );
    }

    #[test]
    fn display_round_trips() {
        for s in ["baseline", "tp:3", "pp:2", "combined:8,4"] {
            assert_eq!(s.parse::<ExecutionStrategy>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn rejects_malformed() {
        for s in [
            "",
            "tp",
            "tp:0",
            "pp:-1",
            "combined:4",
            "combined:0,2",
            "gpu:2",
            "baseline:1",
            "tp:x",
        ] {
            assert!(s.parse::<ExecutionStrategy>().is_err(), "{s}");
        }
    }

    #[test]
    fn mode_invariants() {
        let bad = [
            ExecutionStrategy {
                mode: Mode::Baseline,
                workers: 2,
                interleave: 1,
            },
            ExecutionStrategy {
                mode: Mode::TaskParallel,
                workers: 2,
                interleave: 2,
            },
            ExecutionStrategy {
                mode: Mode::PipelineParallel,
                workers: 2,
                interleave: 2,
            },
        ];
        for s in bad {
            assert!(matches!(s.validate(), Err(Error::Config(_))));
        }
    }
}
