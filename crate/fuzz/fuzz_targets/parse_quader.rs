#![no_main]

use libfuzzer_sys::fuzz_target;
use quaderint::text::parse_quader;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(q) = parse_quader(s) {
        assert_eq!(parse_quader(&q.to_string()).unwrap(), q);
    }
});
