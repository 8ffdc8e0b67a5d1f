#![no_main]

use libfuzzer_sys::fuzz_target;
use mcbench::bundled;
use mcbench::devicelab::{report, FlopSource, MeasurementTable};

// The first byte picks which bundled file the rest of the input replaces.
fuzz_target!(|data: &[u8]| {
    let Some((&which, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    let mut src = bundled::sources();
    let slot = match which % 5 {
        0 => &mut src.platforms,
        1 => &mut src.tasks,
        2 => &mut src.latency,
        3 => &mut src.energy,
        _ => src.resources.get_or_insert_with(Default::default),
    };
    *slot = ("fuzz".to_string(), text.to_string());
    if let Ok(table) = MeasurementTable::load(&src) {
        for p in table.platforms() {
            assert!(p.active_watts >= p.idle_watts && p.idle_watts >= 0.0);
        }
        let _ = report(&table, FlopSource::Published);
    }
});
