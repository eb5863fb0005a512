#![no_main]
use libfuzzer_sys::fuzz_target;
use pdqubo::ip::BinaryProgram;
use pdqubo::reformulate::{reformulate, ReformulateOptions};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = BinaryProgram::from_json(text) {
        let again = BinaryProgram::from_json(&p.to_json().unwrap()).unwrap();
        assert_eq!(p, again);
        // Reformulation must either succeed or refuse cleanly.
        if p.num_vars() <= 12 {
            if let Ok(r) = reformulate(&p, &ReformulateOptions::default()) {
                let zeros = vec![false; r.qubo().num_vars()];
                let d = r.decode(&zeros).unwrap();
                assert_eq!(d.assignment.len(), p.num_vars());
            }
        }
    }
});
