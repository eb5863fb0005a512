#![no_main]
use libfuzzer_sys::fuzz_target;
use pdqubo::reformulate::Sidecar;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(sidecar) = Sidecar::from_json(text) {
        let json = serde_json::to_string(&sidecar).unwrap();
        assert_eq!(Sidecar::from_json(&json).unwrap(), sidecar);
    }
});
