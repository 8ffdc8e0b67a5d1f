use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Black-Scholes geometric Brownian motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbmParams {
    pub s0: f64,
    pub sigma: f64,
    pub r: f64,
}

/// Heston stochastic volatility model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HestonParams {
    pub s0: f64,
    pub v0: f64,
    pub kappa: f64,
    pub theta: f64,
    pub xi: f64,
    pub rho: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Model {
    Gbm(GbmParams),
    Heston(HestonParams),
}

impl GbmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.s0 > 0.0 && self.s0.is_finite()) {
            return Err(Error::config(format!("gbm: s0 must be positive, got {}", self.s0)));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::config(format!("gbm: sigma must be >= 0, got {}", self.sigma)));
        }
        if !self.r.is_finite() {
            return Err(Error::config("gbm: r must be finite"));
        }
        Ok(())
    }
}

impl HestonParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.s0, self.v0, self.kappa, self.theta, self.xi, self.rho, self.r]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::config("heston: parameters must be finite"));
        }
        if self.s0 <= 0.0 {
            return Err(Error::config(format!("heston: s0 must be positive, got {}", self.s0)));
        }
        for (name, value) in [("v0", self.v0), ("theta", self.theta), ("xi", self.xi)] {
            if value < 0.0 {
                return Err(Error::config(format!("heston: {name} must be >= 0, got {value}")));
            }
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(Error::config(format!(
                "heston: rho must lie in [-1, 1], got {}",
                self.rho
            )));
        }
        Ok(())
    }
}

impl Model {
    pub fn validate(&self) -> Result<()> {
        match self {
            Model::Gbm(p) => p.validate(),
            Model::Heston(p) => p.validate(),
        }
    }

    pub fn s0(&self) -> f64 {
        match self {
            Model::Gbm(p) => p.s0,
            Model::Heston(p) => p.s0,
        }
    }

    pub fn rate(&self) -> f64 {
        match self {
            Model::Gbm(p) => p.r,
            Model::Heston(p) => p.r,
        }
    }

    pub fn initial_state(&self) -> PathState {
        match self {
            Model::Gbm(p) => PathState { s: p.s0, v: None },
            Model::Heston(p) => PathState { s: p.s0, v: Some(p.v0) },
        }
    }

    /// Normal deviates consumed per time step.
    pub fn shocks_per_step(&self) -> u8 {
        match self {
            Model::Gbm(_) => 1,
            Model::Heston(_) => 2,
        }
    }
}

/// Spot price and, for Heston, the raw (untruncated) variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathState {
    pub s: f64,
    pub v: Option<f64>,
}

/// GBM step with the loop-invariant terms folded for a fixed `dt`.
#[derive(Debug, Clone, Copy)]
pub struct GbmKernel {
    drift_dt: f64,
    vol_sqrt_dt: f64,
}

impl GbmKernel {
    pub fn new(p: &GbmParams, dt: f64) -> Self {
        Self {
            drift_dt: (p.r - p.sigma * p.sigma / 2.0) * dt,
            vol_sqrt_dt: p.sigma * dt.sqrt(),
        }
    }

    #[inline(always)]
    pub fn step(&self, s: f64, z: f64) -> f64 {
        s * (self.drift_dt + self.vol_sqrt_dt * z).exp()
    }
}

/// Exact log-normal update: `s' = s exp((r - sigma^2/2) dt + sigma sqrt(dt) z)`.
pub fn gbm_step(state: PathState, p: &GbmParams, z: f64, dt: f64) -> PathState {
    PathState {
        s: GbmKernel::new(p, dt).step(state.s, z),
        v: state.v,
    }
}

/// Full-truncation Euler step for Heston, log-Euler on the spot.
#[derive(Debug, Clone, Copy)]
pub struct HestonKernel {
    p: HestonParams,
    dt: f64,
    rho_bar: f64,
}

impl HestonKernel {
    pub fn new(p: &HestonParams, dt: f64) -> Self {
        Self {
            p: *p,
            dt,
            rho_bar: (1.0 - p.rho * p.rho).max(0.0).sqrt(),
        }
    }

    /// Advances `(s, v)` by one step. The variance is floored at zero before
    /// it enters either update; the stored variance may go negative.
    #[inline(always)]
    pub fn step(&self, s: f64, v: f64, z1: f64, z2: f64) -> (f64, f64) {
        let p = &self.p;
        let v_pos = v.max(0.0);
        let sq = (v_pos * self.dt).sqrt();
        let s_next = s * ((p.r - 0.5 * v_pos) * self.dt + sq * z1).exp();
        let zc = p.rho * z1 + self.rho_bar * z2;
        let v_next = v + p.kappa * (p.theta - v_pos) * self.dt + p.xi * sq * zc;
        (s_next, v_next)
    }
}

/// One Heston step. A GBM state (no variance) is treated as starting at `p.v0`.
pub fn heston_step(state: PathState, p: &HestonParams, z1: f64, z2: f64, dt: f64) -> PathState {
    let (s, v) = HestonKernel::new(p, dt).step(state.s, state.v.unwrap_or(p.v0), z1, z2);
    PathState { s, v: Some(v) }
}
