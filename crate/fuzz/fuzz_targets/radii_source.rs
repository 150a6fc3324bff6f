//! Fuzz the radii source parser (bare arrays and solve reports).

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(values) = calaflow_core::io::parse_radii_document(text) {
            assert!(values.iter().all(|v| v.is_finite()));
        }
    }
});
