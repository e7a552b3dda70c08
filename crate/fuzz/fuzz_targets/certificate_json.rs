#![no_main]

use libfuzzer_sys::fuzz_target;

use thresholdlab::Certificate;

fuzz_target!(|data: &str| {
    if let Ok(c) = Certificate::from_json(data) {
        let back = Certificate::from_json(&c.to_json()).expect("round trip");
        assert_eq!(back.to_json(), c.to_json());
    }
});
