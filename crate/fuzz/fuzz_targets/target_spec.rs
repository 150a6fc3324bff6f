//! Fuzz the target curvature file parser: never panic, Ok or clean Err.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(values) = calaflow_core::io::parse_target_values(text) {
            assert!(values.iter().all(|v| v.is_finite()));
        }
    }
});
