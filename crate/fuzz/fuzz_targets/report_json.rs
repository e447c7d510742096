//! Fuzzes deserialization of emitted result tables: the JSON schema the
//! tool itself writes must parse back without panicking, and accepted
//! priors must satisfy the probability-vector invariants.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(reports) = serde_json::from_slice::<Vec<dampcap::CapacityReport>>(data) else {
        return;
    };
    for report in &reports {
        let p = report.prior_direct.entries();
        let sum: f64 = p.iter().sum();
        assert!((sum - 1.0).abs() < 1e-6);
        assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }
});
