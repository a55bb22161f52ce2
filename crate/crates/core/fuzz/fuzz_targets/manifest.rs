#![no_main]

use libfuzzer_sys::fuzz_target;
use tracediag::cli::RunManifest;

fuzz_target!(|data: &[u8]| {
    let _ = serde_json::from_slice::<RunManifest>(data);
});
