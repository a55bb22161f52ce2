#![no_main]

use libfuzzer_sys::fuzz_target;
use tracediag::trace::synth::SynthSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = SynthSpec::parse(text) {
        if spec.samples() <= 10_000 {
            let tr = spec.generate(0);
            assert_eq!(tr.len(), spec.samples());
        }
    }
});
