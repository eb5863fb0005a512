//! Depth-first branch-and-bound for linear-objective binary programs.
//!
//! Variables are fixed in index order, 1-branch first. The bound at a node
//! is the fixed objective plus the sum of negative costs of the unfixed
//! variables. A constraint is checked once its last support variable is
//! fixed. Nodes whose bound merely ties the incumbent are still explored so
//! that the lexicographically smallest optimal assignment is returned.

use std::collections::BTreeMap;
use std::time::Instant;

use serde_json::json;

use super::{Record, SampleSet, SolveStatus};
use crate::ip::{no_good_cut, BinaryProgram};
use crate::{Error, Result, TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbMode {
    /// One provably optimal assignment.
    Optimal,
    /// Repeated solve plus no-good cut over the projection until infeasible.
    EnumerateAll,
    /// The `k` best projected-distinct solutions from a single search.
    Pool(usize),
}

impl BbMode {
    pub fn tag(&self) -> &'static str {
        match self {
            BbMode::Optimal => "bb",
            BbMode::EnumerateAll => "bb-enumerate",
            BbMode::Pool(_) => "bb-pool",
        }
    }
}

struct Search<'a> {
    p: &'a BinaryProgram,
    /// Constraints whose last support variable is `v`.
    closing: Vec<Vec<usize>>,
    /// `negative_tail[d]` = sum of min(0, c_i) for i >= d.
    negative_tail: Vec<f64>,
    x: Vec<bool>,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn new(p: &'a BinaryProgram) -> Self {
        let n = p.num_vars();
        let mut closing = vec![Vec::new(); n];
        let mut always = Vec::new();
        for (k, c) in p.constraints().iter().enumerate() {
            match c.support().into_iter().max() {
                Some(last) => closing[last].push(k),
                None => always.push(k),
            }
        }
        let mut negative_tail = vec![0.0; n + 1];
        for i in (0..n).rev() {
            negative_tail[i] = negative_tail[i + 1] + p.costs()[i].min(0.0);
        }
        let mut s = Self {
            p,
            closing,
            negative_tail,
            x: vec![false; n],
            nodes: 0,
        };
        // Constant constraints are decided before any branching.
        if always.iter().any(|&k| !p.constraints()[k].is_satisfied(&s.x)) {
            s.closing.clear();
        }
        s
    }

    fn infeasible_at_root(&self) -> bool {
        self.closing.len() != self.p.num_vars()
    }

    /// Visits every feasible leaf whose bound is not rejected by `prune`.
    fn dfs(
        &mut self,
        depth: usize,
        fixed: f64,
        prune: &mut dyn FnMut(f64) -> bool,
        leaf: &mut dyn FnMut(&[bool], f64),
    ) {
        self.nodes += 1;
        if depth == self.x.len() {
            leaf(&self.x, fixed);
            return;
        }
        for value in [true, false] {
            self.x[depth] = value;
            let cost = if value { self.p.costs()[depth] } else { 0.0 };
            let violated = self.closing[depth]
                .iter()
                .any(|&k| !self.p.constraints()[k].is_satisfied(&self.x));
            if violated {
                continue;
            }
            let bound = fixed + cost + self.negative_tail[depth + 1];
            if prune(bound) {
                continue;
            }
            self.dfs(depth + 1, fixed + cost, prune, leaf);
        }
        self.x[depth] = false;
    }
}

fn better(obj: f64, x: &[bool], best_obj: f64, best_x: &[bool]) -> bool {
    obj < best_obj - TOL || (obj <= best_obj + TOL && x < best_x)
}

/// Optimal assignment and its objective, plus the node count.
fn solve_optimal(p: &BinaryProgram) -> (Option<(f64, Vec<bool>)>, u64) {
    let mut search = Search::new(p);
    if search.infeasible_at_root() {
        return (None, 0);
    }
    let constant = p.objective_constant();
    let best: std::cell::RefCell<Option<(f64, Vec<bool>)>> = Default::default();
    let mut prune = |bound: f64| {
        best.borrow()
            .as_ref()
            .is_some_and(|(obj, _)| bound + constant > obj + TOL)
    };
    let mut leaf = |x: &[bool], fixed: f64| {
        let obj = fixed + constant;
        let mut slot = best.borrow_mut();
        if slot.as_ref().is_none_or(|(o, bx)| better(obj, x, *o, bx)) {
            *slot = Some((obj, x.to_vec()));
        }
    };
    search.dfs(0, 0.0, &mut prune, &mut leaf);
    (best.into_inner(), search.nodes)
}

fn record(p: &BinaryProgram, obj: f64, x: Vec<bool>) -> Record {
    let config = p.config_key(&x);
    Record {
        assignment: x,
        energy: obj,
        objective: Some(obj),
        feasible: true,
        occurrences: 1,
        config: Some(config),
    }
}

/// Projected key to (objective, assignment).
type Pool = BTreeMap<Vec<bool>, (f64, Vec<bool>)>;

fn pool(p: &BinaryProgram, k: usize) -> (Vec<(f64, Vec<bool>)>, u64) {
    let mut search = Search::new(p);
    if k == 0 || search.infeasible_at_root() {
        return (Vec::new(), 0);
    }
    let constant = p.objective_constant();
    let projection = p.projection();
    let kept: std::cell::RefCell<Pool> = Default::default();
    let worst = |kept: &Pool| {
        kept.iter()
            .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then_with(|| a.1 .1.cmp(&b.1 .1)))
            .map(|(key, (o, x))| (key.clone(), *o, x.clone()))
    };
    let mut prune = |bound: f64| {
        let kept = kept.borrow();
        kept.len() == k && worst(&kept).is_some_and(|(_, o, _)| bound + constant > o + TOL)
    };
    let mut leaf = |x: &[bool], fixed: f64| {
        let obj = fixed + constant;
        let key: Vec<bool> = projection.iter().map(|&i| x[i]).collect();
        let mut kept = kept.borrow_mut();
        match kept.get(&key) {
            Some((o, bx)) if !better(obj, x, *o, bx) => return,
            _ => {}
        }
        kept.insert(key, (obj, x.to_vec()));
        if kept.len() > k {
            let (key, _, _) = worst(&kept).expect("pool is non-empty");
            kept.remove(&key);
        }
    };
    search.dfs(0, 0.0, &mut prune, &mut leaf);
    (kept.into_inner().into_values().collect(), search.nodes)
}

pub fn branch_and_bound(p: &BinaryProgram, mode: BbMode) -> Result<SampleSet> {
    let start = Instant::now();
    let mut set = SampleSet::new(mode.tag());
    set.deterministic = true;
    let mut nodes = 0;
    match mode {
        BbMode::Optimal => {
            let (best, n) = solve_optimal(p);
            nodes = n;
            if let Some((obj, x)) = best {
                set.records.push(record(p, obj, x));
            }
        }
        BbMode::EnumerateAll => {
            let projection = p.projection();
            if projection.is_empty() {
                return Err(Error::Argument("enumeration needs at least one variable".into()));
            }
            let mut current = p.clone();
            let mut iterations = 0u64;
            loop {
                iterations += 1;
                let (best, n) = solve_optimal(&current);
                nodes += n;
                let Some((obj, x)) = best else { break };
                current.add_constraint(no_good_cut(&x, &projection)?)?;
                set.records.push(record(p, obj, x));
            }
            set.metadata.insert("solves".into(), json!(iterations));
        }
        BbMode::Pool(k) => {
            let (kept, n) = pool(p, k);
            nodes = n;
            set.records = kept.into_iter().map(|(o, x)| record(p, o, x)).collect();
            set.metadata.insert("pool_size".into(), json!(k));
        }
    }
    set.normalize();
    set.tau_seconds = start.elapsed().as_secs_f64();
    set.status = if set.records.is_empty() {
        SolveStatus::Infeasible
    } else {
        SolveStatus::Ok
    };
    set.metadata.insert("nodes".into(), json!(nodes));
    Ok(set)
}
