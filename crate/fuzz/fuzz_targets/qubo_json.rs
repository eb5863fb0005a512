#![no_main]
use libfuzzer_sys::fuzz_target;
use pdqubo::qubo::QuboModel;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(q) = QuboModel::from_json(text) {
        let again = QuboModel::from_json(&q.to_json().unwrap()).unwrap();
        assert_eq!(q, again);
        if q.num_vars() <= 16 {
            let _ = q.energy(&vec![true; q.num_vars()]);
            let _ = q.to_ising();
        }
    }
});
