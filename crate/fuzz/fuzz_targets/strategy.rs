#![no_main]

use libfuzzer_sys::fuzz_target;
use mcbench::engine::ExecutionStrategy;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = text.parse::<ExecutionStrategy>() {
        let again: ExecutionStrategy = s.to_string().parse().expect("displayed strategy reparses");
        assert_eq!(again, s);
    }
});
