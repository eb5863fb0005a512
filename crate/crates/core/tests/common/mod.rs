//! Seeded random binary programs shared by the property tests.

#![allow(dead_code)]

use pdqubo::ip::{BinaryProgram, Constraint, Sense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// At most 8 variables and 4 constraints, integer coefficients in [-5, 5].
/// About one constraint in four carries a product term.
pub fn random_program(seed: u64) -> BinaryProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=8);
    let mut p = BinaryProgram::new();
    for i in 0..n {
        let v = p.add_var(format!("x{i}")).unwrap();
        p.set_cost(v, rng.gen_range(-5..=5) as f64).unwrap();
    }
    for k in 0..rng.gen_range(0..=4) {
        let sense = match rng.gen_range(0..3) {
            0 => Sense::Eq,
            1 => Sense::Le,
            _ => Sense::Ge,
        };
        let mut c = Constraint::new(format!("c{k}"), sense, rng.gen_range(-5..=5) as f64);
        for v in 0..n {
            if rng.gen_bool(0.5) {
                let coeff = rng.gen_range(-5..=5);
                if coeff != 0 {
                    c = c.term(v, coeff as f64);
                }
            }
        }
        if n >= 2 && rng.gen_bool(0.25) {
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(1..n)) % n;
            c = c.product(
                a,
                b,
                rng.gen_range(1..=5) as f64 * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
            );
        }
        if c.linear.is_empty() && c.products.is_empty() {
            c = c.term(rng.gen_range(0..n), 1.0);
        }
        p.add_constraint(c).unwrap();
    }
    if rng.gen_bool(0.5) && n > 1 {
        let k = rng.gen_range(1..n);
        p.set_projection((0..k).collect()).unwrap();
    }
    p
}

/// Every assignment of `n` bits, index 0 as the most significant.
pub fn all_assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << n).map(move |m| (0..n).map(|i| m >> (n - 1 - i) & 1 == 1).collect())
}

/// Brute-force optimum over the program, `None` when infeasible.
pub fn ip_optimum(p: &BinaryProgram) -> Option<f64> {
    all_assignments(p.num_vars())
        .filter(|x| p.is_feasible(x).unwrap().feasible)
        .map(|x| p.objective_value(&x).unwrap())
        .min_by(f64::total_cmp)
}
