#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(g) = thresholdlab::Graph::from_json(data) {
        let back = thresholdlab::Graph::from_json(&g.to_json()).expect("round trip");
        assert_eq!(back, g);
    }
});
