#![no_main]

use libfuzzer_sys::fuzz_target;

use thresholdlab::graph::GraphSpec;

fuzz_target!(|data: &str| {
    if let Ok(s) = data.parse::<GraphSpec>() {
        assert_eq!(s.to_string().parse::<GraphSpec>().expect("display parses"), s);
        let _ = s.build(64);
    }
});
