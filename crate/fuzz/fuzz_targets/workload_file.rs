#![no_main]

use libfuzzer_sys::fuzz_target;
use mcbench::bundled;
use mcbench::devicelab::{plan_workload, FlopSource, WorkloadSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(w) = WorkloadSpec::parse(text, "fuzz") else {
        return;
    };
    if let Ok(plan) = plan_workload(&w, &bundled::measurements(), FlopSource::Published) {
        for (d, t) in plan.decisions.iter().zip(&w.tasks) {
            assert_eq!(
                d.allocations.iter().map(|a| a.paths).sum::<u64>(),
                t.total_paths().unwrap()
            );
        }
    }
});
