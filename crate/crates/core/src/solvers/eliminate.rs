//! Exact QUBO minimization by bucket (variable) elimination.
//!
//! Cost is exponential in the induced width of the interaction graph under
//! a greedy min-fill order, not in the number of variables. Penalty QUBOs
//! built from sparse process superstructures have small width, which makes
//! exact global minima available well beyond the enumeration limit.

use std::collections::BTreeSet;

use crate::qubo::QuboModel;
use crate::{Error, Result};

/// Largest factor scope materialized during elimination.
pub const MAX_WIDTH: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub energy: f64,
    pub assignment: Vec<bool>,
    /// Largest intermediate factor scope.
    pub width: usize,
}

struct Factor {
    scope: Vec<usize>,
    table: Vec<f64>,
}

struct Step {
    var: usize,
    scope: Vec<usize>,
    choose_one: Vec<bool>,
}

fn table_index(scope: &[usize], x: &[bool]) -> usize {
    scope
        .iter()
        .enumerate()
        .filter(|(_, &v)| x[v])
        .map(|(k, _)| 1 << k)
        .sum()
}

/// Variable to eliminate next: fewest fill edges, then lowest degree, then
/// lowest index.
fn pick(adj: &[BTreeSet<usize>], alive: &[bool]) -> usize {
    let mut best: Option<(usize, usize, usize)> = None;
    for v in (0..adj.len()).filter(|&v| alive[v]) {
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        let mut fill = 0;
        for (a, &i) in nb.iter().enumerate() {
            for &j in &nb[a + 1..] {
                if !adj[i].contains(&j) {
                    fill += 1;
                }
            }
        }
        let key = (fill, nb.len(), v);
        if best.is_none_or(|b| key < b) {
            best = Some(key);
        }
    }
    best.expect("at least one live variable").2
}

pub fn minimize(q: &QuboModel) -> Result<Minimum> {
    let n = q.num_vars();
    let mut factors: Vec<Option<Factor>> = Vec::new();
    let mut adj = vec![BTreeSet::new(); n];
    let mut constant = q.offset();
    for (i, j, c) in q.terms() {
        if i == j {
            factors.push(Some(Factor {
                scope: vec![i],
                table: vec![0.0, c],
            }));
        } else {
            adj[i].insert(j);
            adj[j].insert(i);
            factors.push(Some(Factor {
                scope: vec![i, j],
                table: vec![0.0, 0.0, 0.0, c],
            }));
        }
    }

    let mut alive = vec![true; n];
    let mut steps: Vec<Step> = Vec::with_capacity(n);
    let mut width = 0;
    let mut x = vec![false; n];
    for _ in 0..n {
        let v = pick(&adj, &alive);
        let bucket: Vec<Factor> = factors
            .iter_mut()
            .filter(|f| f.as_ref().is_some_and(|f| f.scope.contains(&v)))
            .map(|f| f.take().expect("filtered on presence"))
            .collect();
        let scope: Vec<usize> = adj[v].iter().copied().collect();
        if scope.len() > MAX_WIDTH {
            return Err(Error::ExhaustionBound {
                vars: scope.len(),
                limit: MAX_WIDTH,
            });
        }
        width = width.max(scope.len());

        let size = 1usize << scope.len();
        let mut table = vec![0.0; size];
        let mut choose_one = vec![false; size];
        for m in 0..size {
            for (k, &u) in scope.iter().enumerate() {
                x[u] = m >> k & 1 == 1;
            }
            let mut value = [0.0; 2];
            for (b, slot) in value.iter_mut().enumerate() {
                x[v] = b == 1;
                *slot = bucket.iter().map(|f| f.table[table_index(&f.scope, &x)]).sum();
            }
            choose_one[m] = value[1] < value[0];
            table[m] = value[0].min(value[1]);
        }
        x[v] = false;

        for &a in &scope {
            adj[a].remove(&v);
            for &b in &scope {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        adj[v].clear();
        alive[v] = false;
        if scope.is_empty() {
            constant += table[0];
        } else {
            factors.push(Some(Factor {
                scope: scope.clone(),
                table,
            }));
        }
        steps.push(Step {
            var: v,
            scope,
            choose_one,
        });
    }

    let mut assignment = vec![false; n];
    for step in steps.iter().rev() {
        assignment[step.var] = step.choose_one[table_index(&step.scope, &assignment)];
    }
    let energy = q.energy(&assignment)?;
    debug_assert!((energy - constant).abs() <= 1e-6 * (1.0 + constant.abs()));
    Ok(Minimum {
        energy,
        assignment,
        width,
    })
}
