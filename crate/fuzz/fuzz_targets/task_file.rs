#![no_main]

use libfuzzer_sys::fuzz_target;
use mcbench::task::TaskSet;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(set) = TaskSet::parse(text, "fuzz") {
        let again = TaskSet::parse(&set.to_toml(), "fuzz-roundtrip").expect("serialized tasks reparse");
        assert_eq!(again, set);
    }
});
