#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use tracediag::hls::Formula;
use tracediag::search::delta::{read_delta, write_delta};

const REQ: &str = "forall t0 in [0, inf) such that d_pos_x @t (t0) - v_pos_x @t (t0) < 20 and d2obs @t (t0) > 50
---
slot 0 at 20 op OP13 range [0, 1000]
slot 1 at and op OP4 set {and, or}
slot 2 at 50 op OP13 range [0, 100]
";

fuzz_target!(|data: &[u8]| {
    static F: OnceLock<Formula> = OnceLock::new();
    let f = F.get_or_init(|| Formula::parse(REQ).unwrap());
    if let Ok(set) = read_delta(data, f) {
        let mut out = Vec::new();
        write_delta(&mut out, f.slots(), set.records()).unwrap();
        assert_eq!(read_delta(out.as_slice(), f).unwrap(), set);
    }
});
