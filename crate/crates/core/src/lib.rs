//! Monte Carlo option pricing engine and benchmark toolkit.
//!
//! The crate is organised around five areas:
//!
//! * [`simcore`]: counter-based random numbers and per-step evolution of the
//!   Black-Scholes (GBM) and Heston models.
//! * [`payoffs`]: option contracts, path observation, discounting and the
//!   Monte Carlo estimator.
//! * [`engine`]: the map/reduce executor with baseline, task-parallel and
//!   pipeline-parallel schedules, all producing bit-identical prices.
//! * [`metrics`]: static FLOP accounting, latency measurement and power-trace
//!   energy integration.
//! * [`devicelab`]: measured FPGA/CPU/GPU datasets, workload profiling,
//!   variant selection, heterogeneous path splitting and platform reports.

pub mod bundled;
pub mod devicelab;
pub mod engine;
mod error;
pub mod metrics;
pub mod payoffs;
pub mod simcore;
pub mod task;
mod text;

pub use error::{Error, Result};
