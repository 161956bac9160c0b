#![no_main]
use freqrect::format::{parse_oa, serialize_oa};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(oa) = parse_oa(data) {
        assert_eq!(parse_oa(&serialize_oa(&oa)).unwrap(), oa);
    }
});
