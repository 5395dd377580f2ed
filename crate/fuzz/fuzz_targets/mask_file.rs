//! The mask-file parser must handle arbitrary input without panicking:
//! either a parsed whitelist or a parse error.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(mask) = cutstencil::formats::parse_mask_file(text) {
            // a successful parse must survive a write/parse round trip
            let rendered = cutstencil::formats::write_mask_file(&mask);
            let again = cutstencil::formats::parse_mask_file(&rendered)
                .expect("round trip of a valid mask must parse");
            assert_eq!(again.indices.len(), mask.indices.len());
        }
    }
});
