use super::model::{GbmKernel, HestonKernel, Model, PathState};
use super::rng::{gaussian, RngKey, ASSET_SHOCK, VARIANCE_SHOCK};
use crate::payoffs::{accumulate, PathObservation, PayoffSpec};
use crate::task::OptionTask;

#[derive(Debug, Clone, Copy)]
enum Kernel {
    Gbm(GbmKernel),
    Heston(HestonKernel),
}

/// Per-task stepping state shared by every path of a run.
#[derive(Debug, Clone, Copy)]
pub struct PathStepper {
    kernel: Kernel,
    payoff: PayoffSpec,
    initial: PathState,
    seed: u64,
}

impl PathStepper {
    pub fn new(task: &OptionTask, seed: u64) -> Self {
        let dt = task.dt();
        let kernel = match &task.model {
            Model::Gbm(p) => Kernel::Gbm(GbmKernel::new(p, dt)),
            Model::Heston(p) => Kernel::Heston(HestonKernel::new(p, dt)),
        };
        Self {
            kernel,
            payoff: task.payoff,
            initial: task.model.initial_state(),
            seed,
        }
    }

    pub fn initial(&self) -> (PathState, PathObservation) {
        (self.initial, PathObservation::default())
    }

    /// Applies time step `step` of path `path_id` and observes the new spot.
    #[inline]
    pub fn advance(&self, state: &mut PathState, obs: &mut PathObservation, path_id: u64, step: u32) {
        match &self.kernel {
            Kernel::Gbm(k) => {
                let z = gaussian(RngKey::new(self.seed, path_id, step, ASSET_SHOCK));
                state.s = k.step(state.s, z);
            }
            Kernel::Heston(k) => {
                let z1 = gaussian(RngKey::new(self.seed, path_id, step, ASSET_SHOCK));
                let z2 = gaussian(RngKey::new(self.seed, path_id, step, VARIANCE_SHOCK));
                let (s, v) = k.step(state.s, state.v.unwrap_or(0.0), z1, z2);
                state.s = s;
                state.v = Some(v);
            }
        }
        *obs = accumulate(*obs, &self.payoff, state.s);
    }
}

/// Simulates one full path: `task.steps` steps of `dt = (T - t) / steps`.
pub fn simulate_path(task: &OptionTask, path_id: u64, global_seed: u64) -> (PathState, PathObservation) {
    let stepper = PathStepper::new(task, global_seed);
    let (mut state, mut obs) = stepper.initial();
    for step in 0..task.steps {
        stepper.advance(&mut state, &mut obs, path_id, step);
    }
    (state, obs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoffs::{PayoffKind, PayoffSpec};
    use crate::simcore::{GbmParams, HestonParams};

    fn gbm_task(sigma: f64, steps: u32) -> OptionTask {
        OptionTask {
            designation: "t".into(),
            model: Model::Gbm(GbmParams {
                s0: 100.0,
                sigma,
                r: 0.05,
            }),
            payoff: PayoffSpec::new(PayoffKind::ArithmeticAsianCall, 100.0),
            maturity: 1.0,
            valuation_time: 0.0,
            paths: 1,
            steps,
        }
    }

    #[test]
    fn zero_steps_returns_initial_state() {
        let (st, obs) = simulate_path(&gbm_task(0.2, 0), 3, 9);
        assert_eq!(st, PathState { s: 100.0, v: None });
        assert_eq!(obs, PathObservation::default());
    }

    #[test]
    fn repeated_evaluation_is_bit_identical() {
        let t = gbm_task(0.3, 50);
        let a = simulate_path(&t, 17, 5);
        let b = simulate_path(&t, 17, 5);
        assert_eq!(a.0.s.to_bits(), b.0.s.to_bits());
        assert_eq!(a.1.running_sum.to_bits(), b.1.running_sum.to_bits());
        assert_eq!(a.1.count, 50);
        assert_ne!(simulate_path(&t, 18, 5).0.s, a.0.s);
    }

    #[test]
    fn zero_volatility_composes_to_deterministic_growth() {
        for steps in [1, 7, 64, 1000] {
            let (st, _) = simulate_path(&gbm_task(0.0, steps), 0, 1);
            assert!((st.s - 105.127_109_637_602_4).abs() < 1e-9, "steps={steps}: {}", st.s);
        }
    }

    #[test]
    fn heston_path_tracks_variance() {
        let task = OptionTask {
            model: Model::Heston(HestonParams {
                s0: 100.0,
                v0: 0.04,
                kappa: 2.0,
                theta: 0.04,
                xi: 0.3,
                rho: -0.7,
                r: 0.05,
            }),
            ..gbm_task(0.0, 16)
        };
        let (st, obs) = simulate_path(&task, 2, 2);
        assert!(st.v.is_some());
        assert!(st.s > 0.0);
        assert_eq!(obs.count, 16);
    }
}
