#![no_main]

use libfuzzer_sys::fuzz_target;
use mcbench::metrics::OpCostTable;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(table) = OpCostTable::parse(text, "fuzz") {
        let again = OpCostTable::parse(&table.to_text(), "fuzz-roundtrip").expect("serialized table reparses");
        assert_eq!(again, table);
    }
});
