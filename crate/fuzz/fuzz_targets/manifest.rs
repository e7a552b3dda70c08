#![no_main]

use libfuzzer_sys::fuzz_target;

use thresholdlab_cli::manifest::RunManifest;

fuzz_target!(|data: &str| {
    if let Ok(m) = RunManifest::parse(data) {
        let back = RunManifest::parse(&m.render()).expect("rendered manifest parses");
        assert_eq!(back.render(), m.render());
    }
});
