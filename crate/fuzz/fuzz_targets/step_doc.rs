#![no_main]

use libfuzzer_sys::fuzz_target;
use quaderint::format::{parse_step_doc, step_to_toml};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok((t, _)) = parse_step_doc(s) {
        let (back, _) = parse_step_doc(&step_to_toml(&t)).expect("printed step documents parse");
        assert_eq!(back, t);
    }
});
