#![no_main]
use freqrect::format::{parse_hadamard, serialize_hadamard};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(h) = parse_hadamard(data) {
        assert_eq!(parse_hadamard(&serialize_hadamard(&h)).unwrap(), h);
    }
});
