//! Fuzzes the CLI KEY=VALUE parameter parser.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok((key, value)) = dampcap::sweep::parse_param_assignment(data) {
        assert!(!key.is_empty());
        // accepted values must be finite
        match value {
            dampcap::ParamValue::Real(x) => assert!(x.is_finite()),
            dampcap::ParamValue::RealList(xs) => assert!(xs.iter().all(|x| x.is_finite())),
            dampcap::ParamValue::Integer(_) => {}
        }
    }
});
