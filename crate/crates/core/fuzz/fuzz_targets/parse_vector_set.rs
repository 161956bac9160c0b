#![no_main]
use freqrect::format::{parse_vector_set, serialize_vector_set};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(vs) = parse_vector_set(data) {
        let text = serialize_vector_set(&vs).unwrap();
        assert_eq!(parse_vector_set(&text).unwrap(), vs);
    }
});
