#![no_main]

use libfuzzer_sys::fuzz_target;
use mcbench::metrics::{integrate_power, parse_power_trace};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(trace) = parse_power_trace(text, "fuzz") {
        let _ = integrate_power(&trace);
    }
});
