#![no_main]

use libfuzzer_sys::fuzz_target;
use thresholdlab::FamilySpec;

fuzz_target!(|data: &str| {
    // Building is bounded by the declared ground size, so keep inputs short.
    if let Ok(spec) = FamilySpec::parse(data) {
        if data.len() < 512 {
            let _ = spec.build();
        }
    }
});
