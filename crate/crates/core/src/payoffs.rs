//! Option contracts and the Monte Carlo estimator.

use serde::{Deserialize, Serialize};

use crate::engine::ExactSum;
use crate::simcore::{normal_cdf, GbmParams, PathState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PayoffKind {
    EuropeanCall,
    EuropeanPut,
    BarrierKnockout,
    DoubleBarrierKnockout,
    DigitalDoubleBarrier,
    ArithmeticAsianCall,
}

impl PayoffKind {
    pub fn name(self) -> &'static str {
        match self {
            PayoffKind::EuropeanCall => "european-call",
            PayoffKind::EuropeanPut => "european-put",
            PayoffKind::BarrierKnockout => "barrier-knockout",
            PayoffKind::DoubleBarrierKnockout => "double-barrier-knockout",
            PayoffKind::DigitalDoubleBarrier => "digital-double-barrier",
            PayoffKind::ArithmeticAsianCall => "arithmetic-asian-call",
        }
    }

    pub fn is_barrier(self) -> bool {
        matches!(
            self,
            PayoffKind::BarrierKnockout | PayoffKind::DoubleBarrierKnockout | PayoffKind::DigitalDoubleBarrier
        )
    }

    pub fn has_strike(self) -> bool {
        self != PayoffKind::DigitalDoubleBarrier
    }
}

fn default_digital_amount() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayoffSpec {
    pub kind: PayoffKind,
    #[serde(default)]
    pub strike: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_barrier: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_barrier: Option<f64>,
    #[serde(default = "default_digital_amount")]
    pub digital_amount: f64,
}

impl PayoffSpec {
    pub fn new(kind: PayoffKind, strike: f64) -> Self {
        Self {
            kind,
            strike,
            lower_barrier: None,
            upper_barrier: None,
            digital_amount: 1.0,
        }
    }

    pub fn with_barriers(mut self, lower: Option<f64>, upper: Option<f64>) -> Self {
        self.lower_barrier = lower;
        self.upper_barrier = upper;
        self
    }

    pub fn with_digital_amount(mut self, amount: f64) -> Self {
        self.digital_amount = amount;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.kind.name();
        if self.kind.has_strike() && !(self.strike > 0.0 && self.strike.is_finite()) {
            return Err(Error::config(format!(
                "{kind}: strike must be positive, got {}",
                self.strike
            )));
        }
        for b in [self.lower_barrier, self.upper_barrier].into_iter().flatten() {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::config(format!("{kind}: barriers must be positive, got {b}")));
            }
        }
        match self.kind {
            PayoffKind::BarrierKnockout if self.lower_barrier.is_none() && self.upper_barrier.is_none() => {
                return Err(Error::config(format!("{kind}: needs a lower or upper barrier")));
            }
            PayoffKind::DoubleBarrierKnockout | PayoffKind::DigitalDoubleBarrier
                if self.lower_barrier.is_none() || self.upper_barrier.is_none() =>
            {
                return Err(Error::config(format!("{kind}: needs both barriers")));
            }
            _ => {}
        }
        if let (Some(lo), Some(hi)) = (self.lower_barrier, self.upper_barrier) {
            if lo >= hi {
                return Err(Error::config(format!(
                    "{kind}: lower barrier {lo} must be below upper {hi}"
                )));
            }
        }
        if self.kind == PayoffKind::DigitalDoubleBarrier
            && !(self.digital_amount >= 0.0 && self.digital_amount.is_finite())
        {
            return Err(Error::config(format!("{kind}: digital amount must be >= 0")));
        }
        Ok(())
    }
}

/// Path-dependent inputs to the terminal payoff.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PathObservation {
    pub running_sum: f64,
    pub breached: bool,
    pub count: u32,
}

/// Records one monitored spot price.
#[inline]
pub fn accumulate(obs: PathObservation, spec: &PayoffSpec, s: f64) -> PathObservation {
    let mut next = obs;
    next.count += 1;
    if spec.kind == PayoffKind::ArithmeticAsianCall {
        next.running_sum += s;
    }
    if spec.kind.is_barrier() {
        let below = spec.lower_barrier.is_some_and(|lo| s <= lo);
        let above = spec.upper_barrier.is_some_and(|hi| s >= hi);
        next.breached = obs.breached || below || above;
    }
    next
}

#[inline]
fn call(s: f64, k: f64) -> f64 {
    (s - k).max(0.0)
}

/// Undiscounted payoff at maturity.
pub fn payoff(spec: &PayoffSpec, terminal: &PathState, obs: &PathObservation) -> Result<f64> {
    let s = terminal.s;
    let k = spec.strike;
    let value = match spec.kind {
        PayoffKind::EuropeanCall => call(s, k),
        PayoffKind::EuropeanPut => (k - s).max(0.0),
        PayoffKind::BarrierKnockout | PayoffKind::DoubleBarrierKnockout => {
            if obs.breached {
                0.0
            } else {
                call(s, k)
            }
        }
        PayoffKind::DigitalDoubleBarrier => {
            if obs.breached {
                0.0
            } else {
                spec.digital_amount
            }
        }
        PayoffKind::ArithmeticAsianCall => {
            if obs.count == 0 {
                return Err(Error::InvalidObservation(
                    "asian payoff needs at least one monitored price".into(),
                ));
            }
            call(obs.running_sum / f64::from(obs.count), k)
        }
    };
    Ok(value)
}

/// Present value factor `e^{-r (T - t)}` applied to `value`.
pub fn discount(value: f64, r: f64, maturity: f64, valuation_time: f64) -> f64 {
    value * (-r * (maturity - valuation_time)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

impl Estimate {
    /// Mean and standard error from exact first and second moment sums.
    pub fn from_sums(sum: &ExactSum, sum_sq: &ExactSum, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let nf = n as f64;
        let mean = sum.to_f64() / nf;
        let stderr = if n == 1 {
            0.0
        } else {
            let centered = sum_sq.to_f64() - mean * sum.to_f64();
            let var = (centered / (nf - 1.0)).max(0.0);
            (var / nf).sqrt()
        };
        Ok(Self { mean, stderr, n })
    }
}

/// Sample mean and standard error (unbiased variance).
///
/// Uses the same exact accumulation as the engine's reduction, so the result
/// does not depend on how `values` would be split across workers.
pub fn estimate(values: &[f64]) -> Result<Estimate> {
    let mut sum = ExactSum::new();
    let mut sum_sq = ExactSum::new();
    for &v in values {
        sum.add(v);
        sum_sq.add(v * v);
    }
    Estimate::from_sums(&sum, &sum_sq, values.len() as u64)
}

/// Black-Scholes price of a European call.
pub fn bs_closed_form(p: &GbmParams, strike: f64, maturity: f64) -> f64 {
    let df = (-p.r * maturity).exp();
    if strike <= 0.0 {
        return p.s0;
    }
    let vol = p.sigma * maturity.sqrt();
    if vol == 0.0 {
        return (p.s0 - strike * df).max(0.0);
    }
    let d1 = ((p.s0 / strike).ln() + (p.r + 0.5 * p.sigma * p.sigma) * maturity) / vol;
    let d2 = d1 - vol;
    p.s0 * normal_cdf(d1) - strike * df * normal_cdf(d2)
}
