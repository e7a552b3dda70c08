#![no_main]

use libfuzzer_sys::fuzz_target;

use thresholdlab::FractionalCertificate;

fuzz_target!(|data: &str| {
    let _ = FractionalCertificate::from_json(data);
});
