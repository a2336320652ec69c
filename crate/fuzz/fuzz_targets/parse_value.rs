#![no_main]

use libfuzzer_sys::fuzz_target;
use quaderint::text::parse_value;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(v) = parse_value(s) {
        assert_eq!(parse_value(&v.to_string()).unwrap(), v);
    }
});
