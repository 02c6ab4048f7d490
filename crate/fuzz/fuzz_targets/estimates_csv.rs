#![no_main]

use fairprep::audit::{AuditInput, EstimateColumns};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let cols = EstimateColumns {
        estimate: "estimate",
        group: "group",
        stratum: Some("stratum"),
    };
    if let Ok(input) = AuditInput::from_csv(data, &cols) {
        assert_eq!(input.estimates.len(), input.groups.len());
        assert!(input.estimates.iter().all(|e| e.is_finite()));
    }
});
