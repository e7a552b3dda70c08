#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(g) = thresholdlab::Graph::parse_edge_list(data) {
        assert!(g.edge_count() <= g.n() * g.n().saturating_sub(1) / 2);
    }
});
