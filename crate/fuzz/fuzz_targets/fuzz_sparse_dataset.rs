//! Fuzz the sparse `label idx:val ...` dataset parser. Accepted inputs must
//! survive a serialise/re-parse round trip; everything else must be a clean
//! error.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(d) = abcd_core::data::parse_sparse_text(text, None) {
            let round = abcd_core::data::to_sparse_text(&d);
            let again = abcd_core::data::parse_sparse_text(&round, Some(d.dim().max(1)))
                .expect("serialised dataset must re-parse");
            assert_eq!(again.n_samples(), d.n_samples());
            assert_eq!(again.labels(), d.labels());
        }
        // A declared dimension must only ever tighten acceptance.
        let _ = abcd_core::data::parse_sparse_text(text, Some(3));
    }
});
