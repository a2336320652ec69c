#![no_main]

use libfuzzer_sys::fuzz_target;
use quaderint::format::{parse_set_doc, set_to_parkettable};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(qs) = parse_set_doc(s) {
        if qs.len() <= 8 {
            let _ = set_to_parkettable(&qs);
        }
    }
});
