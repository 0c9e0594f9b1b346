#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(inst) = spatial_align::io::parse_instance(text) {
            let again = spatial_align::io::instance_to_json(&inst).to_string();
            spatial_align::io::parse_instance(&again).expect("serialized instance parses");
        }
    }
});
