//! Fuzzes the JSON sweep-configuration parser. Parsing must never panic;
//! accepted configs must expand to a well-formed grid.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = dampcap::sweep::parse_config(text) {
        let grid = spec.grid();
        assert_eq!(grid.len(), spec.cardinality());
    }
});
