#![no_main]

use libfuzzer_sys::fuzz_target;
use tracediag::hls::Formula;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = Formula::parse(text) {
        // Rendering must parse back to the same formula.
        let again = Formula::parse(&f.to_string()).expect("rendered formula parses");
        assert_eq!(again, f);
    }
});
