#![no_main]

use libfuzzer_sys::fuzz_target;
use tracediag::trace::Trace;

fuzz_target!(|data: &[u8]| {
    if let Ok(tr) = Trace::from_reader(data) {
        let mut out = Vec::new();
        tr.write_to(&mut out).unwrap();
        assert_eq!(Trace::from_reader(out.as_slice()).unwrap(), tr);
        let last = tr.timestamps()[tr.len() - 1];
        assert_eq!(tr.t2i(last).unwrap(), tr.len() - 1);
    }
});
