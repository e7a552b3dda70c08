#![no_main]

use libfuzzer_sys::fuzz_target;

use thresholdlab::cover::CoverFamily;

fuzz_target!(|data: &str| {
    if let Ok(c) = CoverFamily::from_json(data) {
        let back = CoverFamily::from_json(&c.to_json()).expect("round trip");
        assert_eq!(back.to_json(), c.to_json());
    }
});
