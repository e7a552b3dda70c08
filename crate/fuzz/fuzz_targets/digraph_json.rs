#![no_main]

use libfuzzer_sys::fuzz_target;

use thresholdlab::random::Digraph;

fuzz_target!(|data: &str| {
    if let Ok(d) = Digraph::from_json(data) {
        let back = Digraph::from_json(&d.to_json()).expect("round trip");
        assert_eq!(back.to_json(), d.to_json());
    }
});
