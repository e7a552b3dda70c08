#![no_main]

use libfuzzer_sys::fuzz_target;

use thresholdlab_cli::config::ExperimentConfig;

fuzz_target!(|data: &str| {
    if let Ok(c) = ExperimentConfig::from_json(data) {
        let _ = c.hash();
        let _ = c.plan();
    }
});
