//! Fuzz the trace-CSV reader used by `report`: malformed rows must be
//! rejected with positioned errors, never panics.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = abcd_core::trace::parse_csv(text);
    }
});
