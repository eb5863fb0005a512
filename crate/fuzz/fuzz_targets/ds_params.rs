#![no_main]
use libfuzzer_sys::fuzz_target;
use pdqubo::flowsheets::{build_ds_discrete, DsDesignSpace};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(space) = DsDesignSpace::from_json(text) {
        assert_eq!(DsDesignSpace::from_json(&space.to_json().unwrap()).unwrap(), space);
        if let Ok(p) = build_ds_discrete(&space) {
            assert_eq!(p.num_vars(), space.flows.len());
        }
    }
});
