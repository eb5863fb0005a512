//! Ground-truth enumeration.
//!
//! QUBO enumeration walks the reflected Gray code so that each step flips a
//! single bit and updates the energy through one local field. The running
//! energy is resynchronized from scratch periodically, and any candidate
//! near the current best is re-evaluated exactly before it is kept.

use std::collections::{BTreeSet, BinaryHeap};
use std::time::Instant;

use serde_json::json;

use super::{Record, SampleSet, SolveStatus};
use crate::ip::{BinaryProgram, Constraint, Sense};
use crate::qubo::QuboModel;
use crate::{Error, Result, TOL};

/// Largest model (in bits) enumerated exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 30;
/// Largest model whose full record list may be materialized.
pub const MATERIALIZE_LIMIT: usize = 20;
/// Programs up to this size are enumerated assignment by assignment; larger
/// ones by depth-first enumeration with interval pruning.
pub const PLAIN_PROGRAM_LIMIT: usize = 24;

const RESYNC_INTERVAL: u64 = 1 << 16;
const CANDIDATE_SLACK: f64 = 1e-6;

fn check_limit(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::ExhaustionBound { vars: n, limit })
    } else {
        Ok(())
    }
}

/// Visits every assignment of `q` once, passing the (approximate) running
/// energy. The callback may request the exact energy via the model.
fn gray_walk(q: &QuboModel, mut visit: impl FnMut(&[bool], f64)) {
    let n = q.num_vars();
    let compiled = q.compile();
    let mut x = vec![false; n];
    let mut e = compiled.energy(&x);
    visit(&x, e);
    for step in 1u64..(1u64 << n) {
        let i = step.trailing_zeros() as usize;
        let field = compiled.local_field(i, &x);
        e += if x[i] { -field } else { field };
        x[i] = !x[i];
        if step % RESYNC_INTERVAL == 0 {
            e = compiled.energy(&x);
        }
        visit(&x, e);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStates {
    pub energy: f64,
    /// Every minimizing assignment, lexicographically sorted.
    pub states: Vec<Vec<bool>>,
}

/// Exact minimum energy and the full argmin set.
pub fn ground_states(q: &QuboModel) -> Result<GroundStates> {
    check_limit(q.num_vars(), EXHAUSTIVE_LIMIT)?;
    let mut best = f64::INFINITY;
    let mut states: Vec<Vec<bool>> = Vec::new();
    gray_walk(q, |x, approx| {
        if approx > best + CANDIDATE_SLACK {
            return;
        }
        let e = q.energy_unchecked(x);
        if e < best - TOL {
            best = e;
            states.clear();
            states.push(x.to_vec());
        } else if e <= best + TOL {
            best = best.min(e);
            states.push(x.to_vec());
        }
    });
    states.sort();
    Ok(GroundStates { energy: best, states })
}

#[derive(PartialEq)]
struct Ranked(f64, Vec<bool>);

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then_with(|| self.1.cmp(&other.1))
    }
}

/// Enumerates every assignment of `q`. With `keep = None` all `2^n` records
/// are returned (requires `n <= MATERIALIZE_LIMIT`); otherwise the `keep`
/// lowest-energy records.
pub fn brute_force_qubo(q: &QuboModel, keep: Option<usize>) -> Result<SampleSet> {
    let n = q.num_vars();
    let keep = match keep {
        Some(k) => {
            check_limit(n, EXHAUSTIVE_LIMIT)?;
            k
        }
        None => {
            check_limit(n, MATERIALIZE_LIMIT)?;
            1usize << n
        }
    };
    let start = Instant::now();
    let mut heap: BinaryHeap<Ranked> = BinaryHeap::new();
    if keep > 0 {
        gray_walk(q, |x, approx| {
            if heap.len() == keep {
                let worst = heap.peek().expect("heap is full").0;
                if approx > worst + CANDIDATE_SLACK {
                    return;
                }
            }
            let candidate = Ranked(q.energy_unchecked(x), x.to_vec());
            if heap.len() < keep {
                heap.push(candidate);
            } else if candidate < *heap.peek().expect("heap is full") {
                heap.pop();
                heap.push(candidate);
            }
        });
    }
    let mut set = SampleSet::new("oracle");
    set.deterministic = true;
    set.records = heap
        .into_sorted_vec()
        .into_iter()
        .map(|Ranked(e, x)| Record::new(x, e))
        .collect();
    set.tau_seconds = start.elapsed().as_secs_f64();
    set.metadata.insert("assignments_total".into(), json!(1u64 << n));
    set.metadata.insert("method".into(), json!("gray-code enumeration"));
    Ok(set)
}

/// Every feasible assignment of `p`, lexicographically sorted.
pub fn feasible_assignments(p: &BinaryProgram) -> Result<Vec<Vec<bool>>> {
    let n = p.num_vars();
    if n <= PLAIN_PROGRAM_LIMIT {
        let mut out = Vec::new();
        let mut x = vec![false; n];
        for m in 0u64..(1u64 << n) {
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = m >> i & 1 == 1;
            }
            if p.feasible_unchecked(&x) {
                out.push(x.clone());
            }
        }
        out.sort();
        Ok(out)
    } else {
        Ok(PrunedEnumerator::new(p).run())
    }
}

/// Depth-first enumeration in variable order (0 before 1), pruning a branch
/// as soon as some constraint's achievable left-hand-side interval excludes
/// its right-hand side. Complete: nothing feasible is ever pruned.
struct PrunedEnumerator<'a> {
    constraints: &'a [Constraint],
    touching: Vec<Vec<usize>>,
    x: Vec<Option<bool>>,
    out: Vec<Vec<bool>>,
}

impl<'a> PrunedEnumerator<'a> {
    fn new(p: &'a BinaryProgram) -> Self {
        let mut touching = vec![Vec::new(); p.num_vars()];
        for (k, c) in p.constraints().iter().enumerate() {
            for v in c.support() {
                touching[v].push(k);
            }
        }
        Self {
            constraints: p.constraints(),
            touching,
            x: vec![None; p.num_vars()],
            out: Vec::new(),
        }
    }

    fn satisfiable(&self, c: &Constraint) -> bool {
        let mut lo = 0.0;
        let mut hi = 0.0;
        let mut add = |value: Option<bool>, k: f64| match value {
            Some(true) => {
                lo += k;
                hi += k;
            }
            Some(false) => {}
            None => {
                lo += k.min(0.0);
                hi += k.max(0.0);
            }
        };
        for &(v, k) in &c.linear {
            add(self.x[v], k);
        }
        for &(a, b, k) in &c.products {
            let value = match (self.x[a], self.x[b]) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            };
            add(value, k);
        }
        match c.sense {
            Sense::Eq => lo <= c.rhs + TOL && hi >= c.rhs - TOL,
            Sense::Le => lo <= c.rhs + TOL,
            Sense::Ge => hi >= c.rhs - TOL,
        }
    }

    fn run(mut self) -> Vec<Vec<bool>> {
        if self.constraints.iter().all(|c| self.satisfiable(c)) {
            self.descend(0);
        }
        self.out
    }

    fn descend(&mut self, depth: usize) {
        if depth == self.x.len() {
            self.out
                .push(self.x.iter().map(|v| v.expect("fully assigned")).collect());
            return;
        }
        for value in [false, true] {
            self.x[depth] = Some(value);
            let ok = self.touching[depth]
                .iter()
                .all(|&k| self.satisfiable(&self.constraints[k]));
            if ok {
                self.descend(depth + 1);
            }
        }
        self.x[depth] = None;
    }
}

/// Complete feasibility labeling of a program: every feasible assignment
/// becomes a record (energy = objective), sorted by objective then
/// assignment. All other assignments are infeasible.
pub fn brute_force_program(p: &BinaryProgram) -> Result<SampleSet> {
    let start = Instant::now();
    let feasible = feasible_assignments(p)?;
    let tau = start.elapsed().as_secs_f64();
    let mut set = SampleSet::new("oracle");
    set.deterministic = true;
    set.records = feasible
        .into_iter()
        .map(|x| {
            let obj = p.objective_unchecked(&x);
            let config = p.config_key(&x);
            Record {
                assignment: x,
                energy: obj,
                objective: Some(obj),
                feasible: true,
                occurrences: 1,
                config: Some(config),
            }
        })
        .collect();
    set.normalize();
    set.tau_seconds = tau;
    set.status = if set.records.is_empty() {
        SolveStatus::Infeasible
    } else {
        SolveStatus::Ok
    };
    let configs: BTreeSet<String> = set.feasible_configs();
    let n = p.num_vars();
    set.metadata.insert("variables".into(), json!(n));
    set.metadata.insert(
        "assignments_total".into(),
        if n < 64 {
            json!(1u64 << n)
        } else {
            json!(format!("2^{n}"))
        },
    );
    set.metadata
        .insert("feasible_assignments".into(), json!(set.records.len()));
    set.metadata.insert("feasible_configs".into(), json!(configs.len()));
    set.metadata.insert(
        "method".into(),
        json!(if n <= PLAIN_PROGRAM_LIMIT {
            "full enumeration"
        } else {
            "pruned depth-first enumeration"
        }),
    );
    Ok(set)
}

/// Best objective per configuration, ranked ascending. The representative
/// assignment is the lexicographically smallest optimal one, and ties
/// between configurations go to the smaller representative.
pub fn rank_configurations(oracle: &SampleSet) -> Vec<(String, f64, Vec<bool>)> {
    let mut best: std::collections::BTreeMap<String, (f64, Vec<bool>)> = Default::default();
    for r in oracle.records.iter().filter(|r| r.feasible) {
        let Some(key) = &r.config else { continue };
        let obj = r.objective.unwrap_or(r.energy);
        let entry = best.entry(key.clone()).or_insert((obj, r.assignment.clone()));
        if obj < entry.0 - TOL || ((obj - entry.0).abs() <= TOL && r.assignment < entry.1) {
            *entry = (obj, r.assignment.clone());
        }
    }
    let mut ranked: Vec<(String, f64, Vec<bool>)> = best.into_iter().map(|(k, (o, a))| (k, o, a)).collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.2.cmp(&b.2)));
    ranked
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits_to_string;

    #[test]
    fn two_variable_qubo_has_four_sorted_records() {
        let q = QuboModel::from_dense(&[vec![1.0, -3.0], vec![0.0, 1.0]], 0.0).unwrap();
        let s = brute_force_qubo(&q, None).unwrap();
        let energies: Vec<f64> = s.records.iter().map(|r| r.energy).collect();
        assert_eq!(energies, vec![-1.0, 0.0, 1.0, 1.0]);
        assert_eq!(bits_to_string(&s.records[2].assignment), "01");
    }

    #[test]
    fn limits_are_enforced() {
        let q = QuboModel::new(MATERIALIZE_LIMIT + 1);
        assert!(matches!(brute_force_qubo(&q, None), Err(Error::ExhaustionBound { .. })));
        let q = QuboModel::new(EXHAUSTIVE_LIMIT + 1);
        assert!(ground_states(&q).is_err());
    }

    #[test]
    fn ground_states_collects_ties() {
        let mut q = QuboModel::new(3);
        q.add_linear(0, -1.0).unwrap();
        q.add_linear(1, -1.0).unwrap();
        q.add_term(0, 1, 1.0).unwrap();
        let g = ground_states(&q).unwrap();
        assert_eq!(g.energy, -1.0);
        let states: Vec<String> = g.states.iter().map(|s| bits_to_string(s)).collect();
        assert_eq!(states, vec!["010", "011", "100", "101", "110", "111"]);
    }

    #[test]
    fn pruned_and_plain_enumeration_agree() {
        let mut p = BinaryProgram::new();
        for i in 0..6 {
            p.add_var(format!("v{i}")).unwrap();
        }
        p.add_constraint(
            Constraint::new("a", Sense::Ge, 1.0)
                .term(0, 1.0)
                .term(3, 1.0)
                .product(1, 2, -1.0),
        )
        .unwrap();
        p.add_constraint(Constraint::new("b", Sense::Eq, 1.0).term(4, 1.0).term(5, 1.0))
            .unwrap();
        p.add_constraint(Constraint::new("c", Sense::Le, 1.0).term(0, 2.0).term(5, -1.0))
            .unwrap();
        let plain = feasible_assignments(&p).unwrap();
        let pruned = PrunedEnumerator::new(&p).run();
        assert_eq!(plain, pruned);
        assert!(!plain.is_empty());
    }
}
