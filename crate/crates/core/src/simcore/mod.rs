//! Random numbers and asset dynamics.
//!
//! Everything here is a pure function of its arguments, so paths can be
//! evaluated in any order, on any number of threads, with identical results.

mod model;
mod normal;
mod path;
mod rng;

pub use model::{gbm_step, heston_step, GbmKernel, GbmParams, HestonKernel, HestonParams, Model, PathState};
pub use normal::{inverse_normal_cdf, normal_cdf};
pub use path::{simulate_path, PathStepper};
pub use rng::{gaussian, philox4x32_10, uniform, RngKey, ASSET_SHOCK, VARIANCE_SHOCK};
