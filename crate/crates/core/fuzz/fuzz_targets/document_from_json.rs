#![no_main]
use freqrect::format::{document_from_json, parse_document};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = document_from_json(text) {
        let again = parse_document(&doc.to_text().unwrap()).unwrap();
        assert_eq!(again, doc);
    }
});
