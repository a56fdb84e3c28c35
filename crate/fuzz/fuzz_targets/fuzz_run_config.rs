//! Fuzz the run-configuration parser: arbitrary text must either parse into
//! a config that re-serialises and re-parses to the same value, or fail
//! cleanly with an error. No panics, no crashes.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = abcd_core::config::parse(text) {
            let round = abcd_core::config::serialize(&cfg);
            let again = abcd_core::config::parse(&round).expect("serialised config must re-parse");
            assert_eq!(cfg, again, "config round-trip must be the identity");
        }
    }
});
