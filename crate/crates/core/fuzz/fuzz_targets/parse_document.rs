#![no_main]
use freqrect::format::{document_from_json, document_to_json, parse_document};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    // Text and JSON encodings of an accepted document agree.
    if let Ok(doc) = parse_document(data) {
        let json = document_to_json(&doc);
        assert_eq!(document_from_json(&json).unwrap(), doc);
    }
});
