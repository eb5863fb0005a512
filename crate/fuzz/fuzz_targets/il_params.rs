#![no_main]
use libfuzzer_sys::fuzz_target;
use pdqubo::flowsheets::{build_il_discrete, IlDesignSpace};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(space) = IlDesignSpace::from_json(text) {
        assert_eq!(IlDesignSpace::from_json(&space.to_json().unwrap()).unwrap(), space);
        let _ = build_il_discrete(&space);
    }
});
