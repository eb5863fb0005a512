#![no_main]
use libfuzzer_sys::fuzz_target;
use pdqubo::solvers::{import_samples_str, SampleSet};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(set) = SampleSet::from_json(text) {
        let again = SampleSet::from_json(&set.to_json().unwrap()).unwrap();
        assert_eq!(set, again);
        let import = import_samples_str(text, None, true).unwrap();
        assert!(import.mismatched.is_empty());
    }
});
