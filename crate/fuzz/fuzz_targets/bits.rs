#![no_main]
use libfuzzer_sys::fuzz_target;
use pdqubo::{bits_from_str, bits_to_string};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(bits) = bits_from_str(text) {
        assert_eq!(bits.len(), text.chars().count());
        assert_eq!(bits_to_string(&bits), text);
    }
});
