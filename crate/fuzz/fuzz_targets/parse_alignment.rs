#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use spatial_align::Instance;

fn fig1() -> &'static Instance {
    static INSTANCE: OnceLock<Instance> = OnceLock::new();
    INSTANCE.get_or_init(|| {
        spatial_align::io::parse_instance(include_str!("../../fixtures/fig1.json"))
            .expect("fixture parses")
    })
}

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(a) = spatial_align::io::parse_alignment(fig1(), text) {
            let _ = spatial_align::validate_alignment(fig1(), &a);
        }
    }
});
