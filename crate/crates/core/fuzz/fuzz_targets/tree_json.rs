#![no_main]

use libfuzzer_sys::fuzz_target;
use tracediag::diagnose::{agreement, export};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(tree) = export::from_json(text) {
        let _ = export::to_text(&tree);
        let _ = export::to_dot(&tree);
        // Any accepted tree must route every grid point.
        if let Ok(c) = agreement(&tree, &tree, &tree.schema, 3, 10_000) {
            assert_eq!(c.fp + c.fn_, 0);
        }
    }
});
