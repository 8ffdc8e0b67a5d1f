//! Static FLOP model of the pricing kernels.
//!
//! Counts are derived from the arithmetic each kernel performs per time step
//! and per path, with loop-invariant terms (dt, drift, sqrt(1 - rho^2))
//! hoisted out of the path loop and therefore not counted.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::payoffs::PayoffKind;
use crate::simcore::Model;
use crate::task::OptionTask;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpClass {
    AddSub,
    Mul,
    Div,
    CompareSelect,
    Exp,
    Log,
    Sqrt,
    InverseCdf,
}

impl OpClass {
    pub const ALL: [OpClass; 8] = [
        OpClass::AddSub,
        OpClass::Mul,
        OpClass::Div,
        OpClass::CompareSelect,
        OpClass::Exp,
        OpClass::Log,
        OpClass::Sqrt,
        OpClass::InverseCdf,
    ];

    pub fn key(self) -> &'static str {
        match self {
            OpClass::AddSub => "add_sub",
            OpClass::Mul => "mul",
            OpClass::Div => "div",
            OpClass::CompareSelect => "compare_select",
            OpClass::Exp => "exp",
            OpClass::Log => "log",
            OpClass::Sqrt => "sqrt",
            OpClass::InverseCdf => "inverse_cdf",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for OpClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for OpClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OpClass::ALL
            .into_iter()
            .find(|c| c.key() == s)
            .ok_or_else(|| Error::config(format!("unknown operation class `{s}`")))
    }
}

/// FLOP weight per operation class. Compare/select is pinned to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpCostTable {
    weights: [Option<u64>; 8],
}

impl Default for OpCostTable {
    fn default() -> Self {
        let mut t = Self::empty();
        for (class, w) in [
            (OpClass::AddSub, 1),
            (OpClass::Mul, 1),
            (OpClass::Div, 1),
            (OpClass::CompareSelect, 1),
            (OpClass::Exp, 8),
            (OpClass::Log, 8),
            (OpClass::Sqrt, 1),
            (OpClass::InverseCdf, 20),
        ] {
            t.weights[class.index()] = Some(w);
        }
        t
    }
}

impl OpCostTable {
    /// A table with no weights; every class must be set before use.
    pub fn empty() -> Self {
        Self { weights: [None; 8] }
    }

    pub fn set(&mut self, class: OpClass, weight: u64) -> Result<()> {
        if class == OpClass::CompareSelect && weight != 1 {
            return Err(Error::config(format!(
                "compare_select weight is fixed at 1, got {weight}"
            )));
        }
        self.weights[class.index()] = Some(weight);
        Ok(())
    }

    pub fn weight(&self, class: OpClass) -> Option<u64> {
        self.weights[class.index()]
    }

    /// Parses `class = weight` lines, starting from an empty table.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut table = Self::empty();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(source, lineno, format!("expected `class = weight`, got `{line}`")))?;
            let class: OpClass = key
                .trim()
                .parse()
                .map_err(|e: Error| Error::parse(source, lineno, e.to_string()))?;
            let weight: u64 = value
                .trim()
                .parse()
                .map_err(|_| Error::parse(source, lineno, format!("invalid weight `{}`", value.trim())))?;
            if table.weight(class).is_some() {
                return Err(Error::parse(source, lineno, format!("duplicate entry for `{class}`")));
            }
            table
                .set(class, weight)
                .map_err(|e| Error::parse(source, lineno, e.to_string()))?;
        }
        Ok(table)
    }

    pub fn to_text(&self) -> String {
        OpClass::ALL
            .iter()
            .filter_map(|c| self.weight(*c).map(|w| format!("{} = {w}\n", c.key())))
            .collect()
    }
}

/// Operation counts per class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCount([u64; 8]);

impl OpCount {
    pub fn of(items: &[(OpClass, u64)]) -> Self {
        let mut c = Self::default();
        for &(class, n) in items {
            c.0[class.index()] += n;
        }
        c
    }

    pub fn get(&self, class: OpClass) -> u64 {
        self.0[class.index()]
    }

    pub fn plus(mut self, other: OpCount) -> Self {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
        self
    }

    pub fn cost(&self, table: &OpCostTable) -> Result<u64> {
        let mut total = 0u64;
        for class in OpClass::ALL {
            let n = self.get(class);
            if n == 0 {
                continue;
            }
            let w = table
                .weight(class)
                .ok_or_else(|| Error::config(format!("cost table has no weight for `{class}`")))?;
            total = n
                .checked_mul(w)
                .and_then(|x| total.checked_add(x))
                .ok_or_else(|| Error::config("FLOP count overflows"))?;
        }
        Ok(total)
    }
}

use OpClass::*;

/// One normal deviate: integer-to-unit scaling plus the inverse CDF.
fn deviate() -> OpCount {
    OpCount::of(&[(Mul, 1), (InverseCdf, 1)])
}

/// One model time step, including its random deviates.
pub fn model_step_ops(model: &Model) -> OpCount {
    match model {
        // s * exp(drift_dt + vol_sqrt_dt * z)
        Model::Gbm(_) => OpCount::of(&[(Mul, 2), (AddSub, 1), (Exp, 1)]).plus(deviate()),
        // v+ = max(v, 0); sq = sqrt(v+ dt);
        // s' = s exp((r - 0.5 v+) dt + sq z1);
        // zc = rho z1 + rho_bar z2;
        // v' = v + kappa (theta - v+) dt + xi sq zc
        Model::Heston(_) => OpCount::of(&[(CompareSelect, 1), (Sqrt, 1), (Exp, 1), (Mul, 11), (AddSub, 6)])
            .plus(deviate())
            .plus(deviate()),
    }
}

/// Per-step observation work.
pub fn accumulate_ops(task: &OptionTask) -> OpCount {
    let p = &task.payoff;
    match p.kind {
        PayoffKind::EuropeanCall | PayoffKind::EuropeanPut => OpCount::default(),
        PayoffKind::ArithmeticAsianCall => OpCount::of(&[(AddSub, 1)]),
        PayoffKind::BarrierKnockout | PayoffKind::DoubleBarrierKnockout | PayoffKind::DigitalDoubleBarrier => {
            let barriers = u64::from(p.lower_barrier.is_some()) + u64::from(p.upper_barrier.is_some());
            OpCount::of(&[(CompareSelect, barriers)])
        }
    }
}

/// Terminal payoff work. Knock-out gating folds into the final max/select
/// predicate; the digital variant keeps the knock-out datapath and adds one
/// select that substitutes the fixed amount.
pub fn terminal_ops(kind: PayoffKind) -> OpCount {
    let vanilla = OpCount::of(&[(AddSub, 1), (CompareSelect, 1)]);
    match kind {
        PayoffKind::EuropeanCall
        | PayoffKind::EuropeanPut
        | PayoffKind::BarrierKnockout
        | PayoffKind::DoubleBarrierKnockout => vanilla,
        PayoffKind::DigitalDoubleBarrier => vanilla.plus(OpCount::of(&[(CompareSelect, 1)])),
        PayoffKind::ArithmeticAsianCall => vanilla.plus(OpCount::of(&[(Div, 1)])),
    }
}

/// Moment accumulation per path (sum, square, sum of squares).
fn reduce_per_path_ops() -> OpCount {
    OpCount::of(&[(AddSub, 2), (Mul, 1)])
}

/// Mean, variance, standard error and discounting of both.
fn reduce_final_ops() -> OpCount {
    OpCount::of(&[(Div, 3), (Mul, 4), (AddSub, 2), (Sqrt, 1), (Exp, 1)])
}

/// FLOP per simulated path: `steps * (model step + observation) + terminal`.
pub fn flops_per_sim(task: &OptionTask, costs: &OpCostTable) -> Result<u64> {
    let per_step = if task.steps == 0 {
        0
    } else {
        model_step_ops(&task.model).plus(accumulate_ops(task)).cost(costs)?
    };
    let terminal = terminal_ops(task.payoff.kind).cost(costs)?;
    per_step
        .checked_mul(u64::from(task.steps))
        .and_then(|x| x.checked_add(terminal))
        .ok_or_else(|| Error::config("FLOP count overflows"))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlopBreakdown {
    pub path_step: u64,
    pub payoff: u64,
    pub reduce: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlopReport {
    pub per_sim: u64,
    pub total: u64,
    pub breakdown: FlopBreakdown,
}

/// Whole-run FLOP count; `total = per_sim * paths + breakdown.reduce`.
pub fn flop_report(task: &OptionTask, costs: &OpCostTable) -> Result<FlopReport> {
    let overflow = || Error::config("FLOP count overflows");
    let n = task.paths;
    let steps = u64::from(task.steps);
    let (step, observe) = if steps == 0 {
        (0, 0)
    } else {
        (
            model_step_ops(&task.model).cost(costs)?,
            accumulate_ops(task).cost(costs)?,
        )
    };
    let terminal = terminal_ops(task.payoff.kind).cost(costs)?;
    let per_sim = flops_per_sim(task, costs)?;
    let path_step = step
        .checked_mul(steps)
        .and_then(|x| x.checked_mul(n))
        .ok_or_else(overflow)?;
    let payoff = observe
        .checked_mul(steps)
        .and_then(|x| x.checked_add(terminal))
        .and_then(|x| x.checked_mul(n))
        .ok_or_else(overflow)?;
    let reduce_final = reduce_final_ops().cost(costs)?;
    let reduce = reduce_per_path_ops()
        .cost(costs)?
        .checked_mul(n)
        .and_then(|x| x.checked_add(reduce_final))
        .ok_or_else(overflow)?;
    let total = per_sim
        .checked_mul(n)
        .and_then(|x| x.checked_add(reduce))
        .ok_or_else(overflow)?;
    Ok(FlopReport {
        per_sim,
        total,
        breakdown: FlopBreakdown {
            path_step,
            payoff,
            reduce,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoffs::PayoffSpec;
    use crate::simcore::GbmParams;

    fn call_task(steps: u32) -> OptionTask {
        OptionTask {
            designation: "c".into(),
            model: Model::Gbm(GbmParams {
                s0: 100.0,
                sigma: 0.2,
                r: 0.05,
            }),
            payoff: PayoffSpec::new(PayoffKind::EuropeanCall, 100.0),
            maturity: 1.0,
            valuation_time: 0.0,
            paths: 10,
            steps,
        }
    }

    #[test]
    fn zero_steps_is_payoff_only() {
        let costs = OpCostTable::default();
        let want = costs.weight(AddSub).unwrap() + costs.weight(CompareSelect).unwrap();
        assert_eq!(flops_per_sim(&call_task(0), &costs).unwrap(), want);
    }

    #[test]
    fn report_totals_are_consistent() {
        let costs = OpCostTable::default();
        let task = call_task(16);
        let r = flop_report(&task, &costs).unwrap();
        assert_eq!(r.total, r.per_sim * task.paths + r.breakdown.reduce);
        assert_eq!(r.breakdown.path_step + r.breakdown.payoff, r.per_sim * task.paths);
    }

    #[test]
    fn parse_cost_table() {
        let t = OpCostTable::parse(
            "# weights\nadd_sub = 1\nmul=1\ndiv = 4\ncompare_select = 1\nexp = 10\nlog = 10\nsqrt = 2\ninverse_cdf = 30 # tuned\n",
            "costs",
        )
        .unwrap();
        assert_eq!(t.weight(Div), Some(4));
        assert_eq!(t.weight(InverseCdf), Some(30));
        assert_eq!(OpCostTable::parse(&t.to_text(), "again").unwrap(), t);
        assert_eq!(
            OpCostTable::parse(&OpCostTable::default().to_text(), "d").unwrap(),
            OpCostTable::default()
        );
    }

    #[test]
    fn parse_cost_table_errors() {
        for (text, line) in [
            ("add_sub = 1\nfma = 2\n", 2),
            ("compare_select = 2\n", 1),
            ("mul = -1\n", 1),
            ("mul 1\n", 1),
            ("mul = 1\nmul = 2\n", 2),
        ] {
            match OpCostTable::parse(text, "costs.txt") {
                Err(Error::Parse { location, .. }) => assert_eq!(location.line, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn missing_weight_is_a_configuration_error() {
        let mut partial = OpCostTable::empty();
        partial.set(AddSub, 1).unwrap();
        partial.set(CompareSelect, 1).unwrap();
        assert_eq!(flops_per_sim(&call_task(0), &partial).unwrap(), 2);
        assert!(matches!(flops_per_sim(&call_task(1), &partial), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_class() {
        assert!(matches!("fma".parse::<OpClass>(), Err(Error::Config(_))));
        for c in OpClass::ALL {
            assert_eq!(c.key().parse::<OpClass>().unwrap(), c);
        }
    }
}
