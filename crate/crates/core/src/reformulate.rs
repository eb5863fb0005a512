//! Penalty compilation of a [`BinaryProgram`] into a [`QuboModel`].
//!
//! The pipeline, in order:
//!
//! 1. algebraic normalization (`x*y = x` to `x <= y`, `x + y - x*y = 1` to
//!    `x + y >= 1`);
//! 2. constraints of the form `w = x*y` on declared variables become a
//!    Rosenberg gadget on `(x, y, w)` directly;
//! 3. every other product `x*y` is replaced by a shared auxiliary bit
//!    constrained by the same gadget;
//! 4. inequalities gain binary-encoded slack, `ceil(log2(range + 1))` bits;
//! 5. each resulting equality contributes `rho * (lhs - rhs)^2`, with linear
//!    terms folded onto the diagonal.
//!
//! QUBO variable order is: original variables, auxiliary products sorted by
//! variable pair, then slack bits in constraint order. Feasible assignments
//! (with their zero-penalty completion) have energy equal to the original
//! objective, constant included.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ip::{BinaryProgram, Sense};
use crate::qubo::QuboModel;
use crate::solvers::exhaustive::EXHAUSTIVE_LIMIT;
use crate::{bits_to_string, Error, Result, TOL};

/// `x*y - 2(x + y)w + 3w`: zero iff `w = x*y`, at least one otherwise.
pub fn rosenberg_gadget(x: bool, y: bool, w: bool) -> f64 {
    let (x, y, w) = (x as u8 as f64, y as u8 as f64, w as u8 as f64);
    x * y - 2.0 * (x + y) * w + 3.0 * w
}

#[derive(Debug, Clone, Default)]
pub struct ReformulateOptions {
    /// Uniform penalty weight; defaults to `1 + sum |c_i|`.
    pub rho: Option<f64>,
    /// Per-constraint weight overrides keyed by constraint label.
    pub constraint_weights: BTreeMap<String, f64>,
}

impl ReformulateOptions {
    pub fn with_rho(rho: f64) -> Self {
        Self {
            rho: Some(rho),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlackGroup {
    pub constraint: String,
    pub bits: Vec<usize>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxProduct {
    pub vars: (usize, usize),
    pub index: usize,
}

#[derive(Debug, Clone)]
pub struct Reformulation {
    source: BinaryProgram,
    qubo: QuboModel,
    var_map: Vec<usize>,
    slack_groups: Vec<SlackGroup>,
    aux_products: Vec<AuxProduct>,
    product_definitions: Vec<(usize, usize, usize)>,
    rho: f64,
    rho_is_default: bool,
    constraint_weights: BTreeMap<String, f64>,
}

fn is_integer(v: f64) -> bool {
    (v - v.round()).abs() <= TOL
}

pub fn default_rho(p: &BinaryProgram) -> f64 {
    1.0 + p.costs().iter().map(|c| c.abs()).sum::<f64>()
}

pub fn reformulate(p: &BinaryProgram, options: &ReformulateOptions) -> Result<Reformulation> {
    let rho = options.rho.unwrap_or_else(|| default_rho(p));
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Argument(format!("penalty weight must be positive, got {rho}")));
    }
    for (label, &w) in &options.constraint_weights {
        if !p.constraints().iter().any(|c| &c.label == label) {
            return Err(Error::Argument(format!(
                "weight override for unknown constraint {label:?}"
            )));
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::Argument(format!("weight for {label:?} must be positive")));
        }
    }

    let normalized = p.normalized();
    let n = p.num_vars();

    let mut product_definitions = Vec::new();
    let mut aux_pairs = BTreeMap::new();
    for c in normalized.constraints() {
        if let Some(def) = c.product_definition() {
            product_definitions.push(def);
        } else {
            for &(a, b, _) in &c.products {
                aux_pairs.insert((a.min(b), a.max(b)), 0usize);
            }
        }
    }
    let mut next = n;
    for idx in aux_pairs.values_mut() {
        *idx = next;
        next += 1;
    }
    let aux_products: Vec<AuxProduct> = aux_pairs
        .iter()
        .map(|(&vars, &index)| AuxProduct { vars, index })
        .collect();

    // Rows over QUBO indices, each to be penalized as an equality.
    struct Row {
        weight: f64,
        terms: BTreeMap<usize, f64>,
        rhs: f64,
    }
    let mut rows = Vec::new();
    let mut slack_groups = Vec::new();
    for c in normalized.constraints() {
        if c.product_definition().is_some() {
            continue;
        }
        let mut terms = BTreeMap::new();
        for &(v, k) in &c.linear {
            *terms.entry(v).or_insert(0.0) += k;
        }
        for &(a, b, k) in &c.products {
            *terms.entry(aux_pairs[&(a.min(b), a.max(b))]).or_insert(0.0) += k;
        }
        let lo: f64 = terms.values().map(|k| k.min(0.0)).sum();
        let hi: f64 = terms.values().map(|k| k.max(0.0)).sum();
        let (range, sign) = match c.sense {
            Sense::Eq => (0.0, 0.0),
            Sense::Le => (c.rhs - lo, 1.0),
            Sense::Ge => (hi - c.rhs, -1.0),
        };
        if c.sense != Sense::Eq {
            if range < -TOL {
                return Err(Error::Reformulation(format!(
                    "constraint {:?} cannot be satisfied (slack range {range})",
                    c.label
                )));
            }
            if !is_integer(range) {
                return Err(Error::Reformulation(format!(
                    "constraint {:?} has non-integer slack range {range}",
                    c.label
                )));
            }
            let range = range.round().max(0.0) as u64;
            let nbits = (u64::BITS - range.leading_zeros()) as usize;
            let mut group = SlackGroup {
                constraint: c.label.clone(),
                bits: Vec::with_capacity(nbits),
                weights: Vec::with_capacity(nbits),
            };
            for k in 0..nbits {
                let weight = (1u64 << k) as f64;
                terms.insert(next, sign * weight);
                group.bits.push(next);
                group.weights.push(weight);
                next += 1;
            }
            slack_groups.push(group);
        }
        rows.push(Row {
            weight: options.constraint_weights.get(&c.label).copied().unwrap_or(rho),
            terms,
            rhs: c.rhs,
        });
    }

    let mut qubo = QuboModel::new(next);
    for (v, &c) in p.costs().iter().enumerate() {
        qubo.add_linear(v, c)?;
    }
    qubo.add_offset(p.objective_constant());

    for row in &rows {
        let terms: Vec<(usize, f64)> = row.terms.iter().map(|(&v, &k)| (v, k)).collect();
        for (a, &(i, ki)) in terms.iter().enumerate() {
            qubo.add_linear(i, row.weight * (ki * ki - 2.0 * row.rhs * ki))?;
            for &(j, kj) in &terms[a + 1..] {
                qubo.add_term(i, j, row.weight * 2.0 * ki * kj)?;
            }
        }
        qubo.add_offset(row.weight * row.rhs * row.rhs);
    }

    let gadgets = aux_products
        .iter()
        .map(|a| (a.index, a.vars.0, a.vars.1))
        .chain(product_definitions.iter().copied());
    for (w, x, y) in gadgets {
        qubo.add_term(x, y, rho)?;
        qubo.add_term(x, w, -2.0 * rho)?;
        qubo.add_term(y, w, -2.0 * rho)?;
        qubo.add_linear(w, 3.0 * rho)?;
    }

    let mut names: Vec<String> = p.var_names().to_vec();
    for a in &aux_products {
        names.push(format!("aux[{}*{}]", p.var_names()[a.vars.0], p.var_names()[a.vars.1]));
    }
    for g in &slack_groups {
        for k in 0..g.bits.len() {
            names.push(format!("slack[{}][{k}]", g.constraint));
        }
    }
    qubo.set_var_names(names)?;

    Ok(Reformulation {
        source: p.clone(),
        qubo,
        var_map: (0..n).collect(),
        slack_groups,
        aux_products,
        product_definitions,
        rho,
        rho_is_default: options.rho.is_none(),
        constraint_weights: options.constraint_weights.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub assignment: Vec<bool>,
    pub feasible: bool,
    pub violations: Vec<String>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub qubo_vars: usize,
    pub ip_vars: usize,
    pub rho: f64,
    pub rho_is_default: bool,
    pub feasible_assignments: usize,
    pub feasible_optimum: Option<f64>,
    pub best_infeasible_energy: Option<f64>,
    /// Feasible IP assignments whose best completion energy differs from the objective.
    pub exactness_failures: Vec<String>,
    /// Infeasible IP assignments whose best energy is at or below the feasible optimum.
    pub dominance_failures: Vec<String>,
    pub dominance_failure_count: usize,
}

impl VerifyReport {
    pub fn exact(&self) -> bool {
        self.exactness_failures.is_empty()
    }

    pub fn dominant(&self) -> bool {
        self.dominance_failure_count == 0
    }

    pub fn passed(&self) -> bool {
        self.exact() && self.dominant()
    }
}

const REPORTED_FAILURES: usize = 64;

impl Reformulation {
    pub fn source(&self) -> &BinaryProgram {
        &self.source
    }

    pub fn qubo(&self) -> &QuboModel {
        &self.qubo
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rho_is_default(&self) -> bool {
        self.rho_is_default
    }

    pub fn offset(&self) -> f64 {
        self.qubo.offset()
    }

    pub fn var_map(&self) -> &[usize] {
        &self.var_map
    }

    pub fn slack_groups(&self) -> &[SlackGroup] {
        &self.slack_groups
    }

    pub fn aux_products(&self) -> &[AuxProduct] {
        &self.aux_products
    }

    pub fn num_slack_bits(&self) -> usize {
        self.slack_groups.iter().map(|g| g.bits.len()).sum()
    }

    /// Maps QUBO bits back to the program and re-checks it; the penalty
    /// energy is never trusted.
    pub fn decode(&self, x: &[bool]) -> Result<Decoded> {
        if x.len() != self.qubo.num_vars() {
            return Err(Error::Dimension {
                expected: self.qubo.num_vars(),
                got: x.len(),
            });
        }
        let assignment: Vec<bool> = self.var_map.iter().map(|&q| x[q]).collect();
        let f = self.source.is_feasible(&assignment)?;
        let objective = self.source.objective_value(&assignment)?;
        Ok(Decoded {
            assignment,
            feasible: f.feasible,
            violations: f.violations,
            objective,
        })
    }

    /// Zero-penalty completion of a program assignment: auxiliaries set to
    /// their products, slack bits to the binary expansion of the residual.
    /// `None` when the assignment is infeasible.
    pub fn complete(&self, ip: &[bool]) -> Result<Option<Vec<bool>>> {
        if !self.source.is_feasible(ip)?.feasible {
            return Ok(None);
        }
        let mut x = vec![false; self.qubo.num_vars()];
        for (v, &q) in self.var_map.iter().enumerate() {
            x[q] = ip[v];
        }
        for a in &self.aux_products {
            x[a.index] = ip[a.vars.0] && ip[a.vars.1];
        }
        let normalized = self.source.normalized();
        for g in &self.slack_groups {
            let c = normalized
                .constraints()
                .iter()
                .find(|c| c.label == g.constraint)
                .expect("slack group refers to an existing constraint");
            let slack = (c.rhs - c.lhs(ip)).abs().round() as u64;
            for (k, &bit) in g.bits.iter().enumerate() {
                x[bit] = slack >> k & 1 == 1;
            }
        }
        Ok(Some(x))
    }

    /// Exhaustive correctness check of the penalty model.
    pub fn verify(&self) -> Result<VerifyReport> {
        let total = self.qubo.num_vars();
        if total > EXHAUSTIVE_LIMIT {
            return Err(Error::ExhaustionBound {
                vars: total,
                limit: EXHAUSTIVE_LIMIT,
            });
        }
        let n = self.source.num_vars();
        let compiled = self.qubo.compile();
        let ip_bits = self.var_map.clone();
        let mut is_ip = vec![false; total];
        for &q in &ip_bits {
            is_ip[q] = true;
        }
        let rest: Vec<usize> = (0..total).filter(|&q| !is_ip[q]).collect();

        let mut x = vec![false; total];
        let mut ip = vec![false; n];
        let mut ip_mask = 0u64;
        let mut feasible = Vec::new();
        let mut infeasible = Vec::new();
        let flip = |x: &mut Vec<bool>, q: usize, e: &mut f64| {
            let field = compiled.local_field(q, x);
            *e += if x[q] { -field } else { field };
            x[q] = !x[q];
        };
        for outer in 0u64..(1u64 << n) {
            if outer > 0 {
                let v = outer.trailing_zeros() as usize;
                x[ip_bits[v]] = !x[ip_bits[v]];
                ip[v] = !ip[v];
                ip_mask ^= 1 << v;
            }
            let mut e = compiled.energy(&x);
            let mut best = e;
            for inner in 1u64..(1u64 << rest.len()) {
                flip(&mut x, rest[inner.trailing_zeros() as usize], &mut e);
                best = best.min(e);
            }
            if self.source.feasible_unchecked(&ip) {
                feasible.push((ip.clone(), self.source.objective_unchecked(&ip), best));
            } else {
                infeasible.push((ip_mask, best));
            }
        }

        let exactness_failures = feasible
            .iter()
            .filter(|(_, obj, e)| (obj - e).abs() > TOL * (1.0 + obj.abs()))
            .map(|(a, _, _)| bits_to_string(a))
            .collect();
        let feasible_optimum = feasible.iter().map(|&(_, o, _)| o).reduce(f64::min);
        let best_infeasible_energy = infeasible.iter().map(|&(_, e)| e).reduce(f64::min);
        let mask_to_string = |m: u64| -> String { (0..n).map(|v| if m >> v & 1 == 1 { '1' } else { '0' }).collect() };
        let mut dominance_failures: Vec<(String, f64)> = match feasible_optimum {
            Some(opt) => infeasible
                .into_iter()
                .filter(|&(_, e)| e <= opt + TOL * (1.0 + opt.abs()))
                .map(|(m, e)| (mask_to_string(m), e))
                .collect(),
            None => Vec::new(),
        };
        dominance_failures.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        let dominance_failure_count = dominance_failures.len();
        Ok(VerifyReport {
            qubo_vars: total,
            ip_vars: n,
            rho: self.rho,
            rho_is_default: self.rho_is_default,
            feasible_assignments: feasible.len(),
            feasible_optimum,
            best_infeasible_energy,
            exactness_failures,
            dominance_failures: dominance_failures
                .into_iter()
                .take(REPORTED_FAILURES)
                .map(|(a, _)| a)
                .collect(),
            dominance_failure_count,
        })
    }

    pub fn sidecar(&self) -> Sidecar {
        let names = self.source.var_names();
        Sidecar {
            var_map: self
                .var_map
                .iter()
                .enumerate()
                .map(|(v, &q)| (names[v].clone(), q))
                .collect(),
            slack_groups: self.slack_groups.clone(),
            aux_products: self
                .aux_products
                .iter()
                .map(|a| SidecarProduct {
                    vars: (names[a.vars.0].clone(), names[a.vars.1].clone()),
                    index: a.index,
                })
                .collect(),
            product_definitions: self
                .product_definitions
                .iter()
                .map(|&(w, x, y)| SidecarProduct {
                    vars: (names[x].clone(), names[y].clone()),
                    index: w,
                })
                .collect(),
            rho: self.rho,
            rho_source: if self.rho_is_default {
                "default: 1 + sum|c|"
            } else {
                "user"
            }
            .into(),
            constraint_weights: self.constraint_weights.clone(),
            offset: self.offset(),
        }
    }

    pub fn write_sidecar(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(&self.sidecar())? + "\n")?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidecarProduct {
    pub vars: (String, String),
    pub index: usize,
}

/// Reformulation metadata written next to the QUBO file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub var_map: BTreeMap<String, usize>,
    pub slack_groups: Vec<SlackGroup>,
    pub aux_products: Vec<SidecarProduct>,
    pub product_definitions: Vec<SidecarProduct>,
    pub rho: f64,
    pub rho_source: String,
    pub constraint_weights: BTreeMap<String, f64>,
    pub offset: f64,
}

impl Sidecar {
    pub fn from_json(s: &str) -> Result<Self> {
        let sidecar: Sidecar = serde_json::from_str(s)?;
        if !(sidecar.rho > 0.0 && sidecar.rho.is_finite()) {
            return Err(Error::Schema("rho must be positive".into()));
        }
        for g in &sidecar.slack_groups {
            if g.bits.len() != g.weights.len() {
                return Err(Error::Schema(format!(
                    "slack group {:?} has mismatched bits and weights",
                    g.constraint
                )));
            }
        }
        Ok(sidecar)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ip::Constraint;

    fn enumerate(n: usize) -> impl Iterator<Item = Vec<bool>> {
        (0u64..(1 << n)).map(move |m| (0..n).map(|i| m >> i & 1 == 1).collect())
    }

    fn argmin(q: &QuboModel) -> (f64, Vec<Vec<bool>>) {
        let mut best = f64::INFINITY;
        let mut arg = Vec::new();
        for x in enumerate(q.num_vars()) {
            let e = q.energy(&x).unwrap();
            if e < best - 1e-12 {
                best = e;
                arg = vec![x];
            } else if (e - best).abs() <= 1e-12 {
                arg.push(x);
            }
        }
        (best, arg)
    }

    #[test]
    fn rosenberg_truth_table() {
        let table = [
            ((false, false, false), 0.0),
            ((false, false, true), 3.0),
            ((false, true, false), 0.0),
            ((false, true, true), 1.0),
            ((true, false, false), 0.0),
            ((true, false, true), 1.0),
            ((true, true, false), 1.0),
            ((true, true, true), 0.0),
        ];
        for ((x, y, w), expected) in table {
            assert_eq!(rosenberg_gadget(x, y, w), expected);
        }
    }

    #[test]
    fn equality_with_costs() {
        let mut p = BinaryProgram::new();
        let a = p.add_var("a").unwrap();
        let b = p.add_var("b").unwrap();
        p.set_cost(a, 1.0).unwrap();
        p.set_cost(b, 2.0).unwrap();
        p.add_constraint(Constraint::new("one", Sense::Eq, 1.0).term(a, 1.0).term(b, 1.0))
            .unwrap();
        let r = reformulate(&p, &ReformulateOptions::with_rho(10.0)).unwrap();
        assert_eq!(r.qubo().num_vars(), 2);
        let (e, arg) = argmin(r.qubo());
        assert_eq!(e, 1.0);
        assert_eq!(arg, vec![vec![true, false]]);
    }

    #[test]
    fn covering_inequality_slack() {
        let mut p = BinaryProgram::new();
        for n in ["y1", "y2", "y3"] {
            p.add_var(n).unwrap();
        }
        p.add_constraint(
            Constraint::new("cover", Sense::Ge, 1.0)
                .term(0, 1.0)
                .term(1, 1.0)
                .term(2, 1.0),
        )
        .unwrap();
        let r = reformulate(&p, &ReformulateOptions::default()).unwrap();
        assert_eq!(r.slack_groups().len(), 1);
        assert_eq!(r.slack_groups()[0].weights, vec![1.0, 2.0]);
        assert_eq!(r.qubo().num_vars(), 5);
        // Every nonempty selection has a zero-penalty completion; the empty one has none.
        let mut zero_penalty = std::collections::BTreeSet::new();
        for x in enumerate(5) {
            if r.qubo().energy(&x).unwrap().abs() < 1e-12 {
                zero_penalty.insert(x[..3].to_vec());
            }
        }
        assert_eq!(zero_penalty.len(), 7);
        assert!(!zero_penalty.contains(&vec![false, false, false]));
        for sel in zero_penalty {
            assert!(r.decode(&r.complete(&sel).unwrap().unwrap()).unwrap().feasible);
        }
    }

    #[test]
    fn slack_bit_counts() {
        let mut p = BinaryProgram::new();
        for i in 0..5 {
            p.add_var(format!("v{i}")).unwrap();
        }
        // ranges 0, 1, 2, 3, 4 -> 0, 1, 2, 2, 3 bits
        for (k, (bits, range)) in [(0, 0), (1, 1), (2, 2), (2, 3), (3, 4)].into_iter().enumerate() {
            let mut c = Constraint::new(format!("c{k}"), Sense::Le, 0.0);
            for v in 0..range {
                c = c.term(v, -1.0);
            }
            p.add_constraint(c.term(4, 0.0)).unwrap();
            let r = reformulate(&p, &ReformulateOptions::default()).unwrap();
            assert_eq!(r.slack_groups().last().unwrap().bits.len(), bits, "range {range}");
        }
    }

    #[test]
    fn infeasible_and_fractional_constraints_are_rejected() {
        let mut p = BinaryProgram::new();
        p.add_var("a").unwrap();
        p.add_constraint(Constraint::new("never", Sense::Ge, 2.0).term(0, 1.0))
            .unwrap();
        assert!(matches!(
            reformulate(&p, &ReformulateOptions::default()),
            Err(Error::Reformulation(_))
        ));

        let mut p = BinaryProgram::new();
        p.add_var("a").unwrap();
        p.add_constraint(Constraint::new("half", Sense::Le, 0.5).term(0, 1.0))
            .unwrap();
        assert!(matches!(
            reformulate(&p, &ReformulateOptions::default()),
            Err(Error::Reformulation(_))
        ));
    }

    #[test]
    fn products_get_shared_auxiliaries() {
        let mut p = BinaryProgram::new();
        for n in ["a", "b", "c"] {
            p.add_var(n).unwrap();
        }
        p.add_constraint(Constraint::new("p1", Sense::Le, 0.0).product(0, 1, 1.0).term(2, -1.0))
            .unwrap();
        p.add_constraint(Constraint::new("p2", Sense::Ge, 0.0).product(1, 0, 1.0))
            .unwrap();
        let r = reformulate(&p, &ReformulateOptions::default()).unwrap();
        assert_eq!(r.aux_products().len(), 1);
        assert_eq!(r.aux_products()[0].index, 3);
        let report = r.verify().unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn decode_rechecks_feasibility() {
        let mut p = BinaryProgram::new();
        p.add_var("a").unwrap();
        p.add_var("b").unwrap();
        p.add_constraint(Constraint::new("one", Sense::Eq, 1.0).term(0, 1.0).term(1, 1.0))
            .unwrap();
        let r = reformulate(&p, &ReformulateOptions::with_rho(1e-6)).unwrap();
        let d = r.decode(&[false, false]).unwrap();
        assert!(!d.feasible);
        assert_eq!(d.violations, vec!["one"]);
        assert!(r.decode(&[true]).is_err());
    }

    #[test]
    fn empty_program_is_diagonal() {
        let mut p = BinaryProgram::new();
        p.add_var("a").unwrap();
        p.add_var("b").unwrap();
        p.set_cost(0, -1.0).unwrap();
        p.set_cost(1, 2.0).unwrap();
        let r = reformulate(&p, &ReformulateOptions::default()).unwrap();
        assert!(r.qubo().terms().all(|(i, j, _)| i == j));
        assert!(r.verify().unwrap().passed());
    }

    #[test]
    fn small_rho_breaks_dominance() {
        // Cheapest assignment violates the cover; a tiny penalty lets it win.
        let mut p = BinaryProgram::new();
        p.add_var("a").unwrap();
        p.add_var("b").unwrap();
        p.set_cost(0, 5.0).unwrap();
        p.set_cost(1, 7.0).unwrap();
        p.add_constraint(Constraint::new("cover", Sense::Ge, 1.0).term(0, 1.0).term(1, 1.0))
            .unwrap();
        let ok = reformulate(&p, &ReformulateOptions::default()).unwrap();
        assert!(ok.verify().unwrap().passed());
        let weak = reformulate(&p, &ReformulateOptions::with_rho(2.0)).unwrap();
        let report = weak.verify().unwrap();
        assert!(report.exact());
        assert!(!report.dominant());
        assert_eq!(report.dominance_failures, vec!["00"]);
    }

    #[test]
    fn sidecar_records_rho() {
        let mut p = BinaryProgram::new();
        p.add_var("a").unwrap();
        let r = reformulate(&p, &ReformulateOptions::with_rho(50.0)).unwrap();
        let s = r.sidecar();
        assert_eq!(s.rho, 50.0);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(Sidecar::from_json(&text).unwrap(), s);
    }

    #[test]
    fn weight_overrides_are_validated() {
        let mut p = BinaryProgram::new();
        p.add_var("a").unwrap();
        let mut opts = ReformulateOptions::default();
        opts.constraint_weights.insert("missing".into(), 3.0);
        assert!(matches!(reformulate(&p, &opts), Err(Error::Argument(_))));
        assert!(reformulate(&p, &ReformulateOptions::with_rho(-1.0)).is_err());
    }
}
