#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(values) = spatial_align::io::parse_multiset(text) {
            assert!(!values.is_empty() && values.iter().all(|&v| v > 0));
        }
    }
});
