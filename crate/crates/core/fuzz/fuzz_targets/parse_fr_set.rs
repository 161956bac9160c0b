#![no_main]
use freqrect::format::{parse_fr_set, serialize_fr_set};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    // Accepted sets reserialize to a fixed point.
    if let Ok(set) = parse_fr_set(data) {
        let text = serialize_fr_set(&set);
        assert_eq!(parse_fr_set(&text).unwrap(), set);
    }
});
