//! FLOP accounting, latency and energy measurement.

mod cost;
mod power;

pub use cost::{flop_report, flops_per_sim, FlopBreakdown, FlopReport, OpClass, OpCostTable, OpCount};
pub use power::{integrate_power, parse_power_trace, EnergyReport, PowerSample};

use std::time::Instant;

use crate::{Error, Result};

/// Runs `action` and returns its result with the elapsed wall-clock seconds
/// from a monotonic clock.
pub fn measure_latency<T>(action: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = action();
    (out, start.elapsed().as_secs_f64())
}

/// FLOP per joule.
pub fn efficiency(flops: f64, joules: f64) -> Result<f64> {
    if joules.is_nan() || joules <= 0.0 {
        return Err(Error::InvalidEnergy(joules));
    }
    Ok(flops / joules)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    #[test]
    fn noop_is_fast() {
        let ((), t) = measure_latency(|| ());
        assert!((0.0..1e-3).contains(&t));
    }

    #[test]
    fn sleep_is_measured() {
        let ((), t) = measure_latency(|| std::thread::sleep(Duration::from_millis(100)));
        assert!((t - 0.1).abs() <= 0.02, "{t}");
    }

    #[test]
    fn nested_measurements() {
        let ((_, inner), outer) = measure_latency(|| measure_latency(|| std::thread::sleep(Duration::from_millis(5))));
        assert!(outer >= inner);
    }

    #[test]
    fn efficiency_cases() {
        // 323590 FLOP/sim x 10^7 paths over 1.7 kJ.
        let e = efficiency(323_590.0 * 1e7, 1700.0).unwrap();
        assert!((e - 1.9035e9).abs() / 1.9035e9 < 1e-4);
        assert_eq!(efficiency(10.0, 4.0).unwrap(), 2.0 * efficiency(10.0, 8.0).unwrap());
        assert_eq!(efficiency(0.0, 3.0).unwrap(), 0.0);
        assert!(matches!(efficiency(1.0, 0.0), Err(Error::InvalidEnergy(_))));
        assert!(matches!(efficiency(1.0, -2.0), Err(Error::InvalidEnergy(_))));
    }
}
