//! Constrained binary programs.
//!
//! Objectives are linear. Constraints are linear plus optional bilinear
//! terms `c * y_i * y_j`, evaluated directly on binary assignments.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{bits_to_string, Error, Result, TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Eq => "=",
            Sense::Le => "<=",
            Sense::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub label: String,
    pub linear: Vec<(usize, f64)>,
    pub products: Vec<(usize, usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(label: impl Into<String>, sense: Sense, rhs: f64) -> Self {
        Self {
            label: label.into(),
            linear: Vec::new(),
            products: Vec::new(),
            sense,
            rhs,
        }
    }

    /// Adds `coeff * y_var`, merging repeated variables.
    pub fn term(mut self, var: usize, coeff: f64) -> Self {
        match self.linear.iter_mut().find(|(v, _)| *v == var) {
            Some((_, c)) => *c += coeff,
            None => self.linear.push((var, coeff)),
        }
        self
    }

    pub fn product(mut self, a: usize, b: usize, coeff: f64) -> Self {
        self.products.push((a, b, coeff));
        self
    }

    pub fn lhs(&self, x: &[bool]) -> f64 {
        let lin: f64 = self.linear.iter().filter(|&&(v, _)| x[v]).map(|&(_, c)| c).sum();
        let prod: f64 = self
            .products
            .iter()
            .filter(|&&(a, b, _)| x[a] && x[b])
            .map(|&(_, _, c)| c)
            .sum();
        lin + prod
    }

    pub fn is_satisfied(&self, x: &[bool]) -> bool {
        let lhs = self.lhs(x);
        match self.sense {
            Sense::Eq => (lhs - self.rhs).abs() <= TOL,
            Sense::Le => lhs <= self.rhs + TOL,
            Sense::Ge => lhs >= self.rhs - TOL,
        }
    }

    /// Sorted distinct variables the constraint reads.
    pub fn support(&self) -> Vec<usize> {
        let mut vars: Vec<usize> = self
            .linear
            .iter()
            .map(|&(v, _)| v)
            .chain(self.products.iter().flat_map(|&(a, b, _)| [a, b]))
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// Range of the left-hand side over all binary assignments, treating
    /// every term independently.
    pub fn lhs_bounds(&self) -> (f64, f64) {
        let coeffs = self
            .linear
            .iter()
            .map(|&(_, c)| c)
            .chain(self.products.iter().map(|&(_, _, c)| c));
        coeffs.fold((0.0, 0.0), |(lo, hi), c| (lo + c.min(0.0), hi + c.max(0.0)))
    }

    /// Recognizes `w = x * y` written as `a*w - a*x*y = 0` with `w` distinct
    /// from `x` and `y`. Returns `(w, x, y)`.
    pub fn product_definition(&self) -> Option<(usize, usize, usize)> {
        if self.sense != Sense::Eq || self.rhs != 0.0 {
            return None;
        }
        match (self.linear.as_slice(), self.products.as_slice()) {
            ([(w, a)], [(x, y, p)]) if *a != 0.0 && *a == -*p && w != x && w != y && x != y => Some((*w, *x, *y)),
            _ => None,
        }
    }

    /// Algebraic rewrites that remove products without auxiliaries:
    /// `x*y = x` becomes `x <= y`, and `x + y - x*y = 1` becomes `x + y >= 1`.
    pub fn normalized(&self) -> Constraint {
        if self.sense != Sense::Eq {
            return self.clone();
        }
        match (self.linear.as_slice(), self.products.as_slice()) {
            ([(k, a)], [(i, j, p)]) if self.rhs == 0.0 && *p != 0.0 && *a == -*p && (k == i || k == j) && i != j => {
                let other = if k == i { *j } else { *i };
                Constraint::new(self.label.clone(), Sense::Le, 0.0)
                    .term(*k, 1.0)
                    .term(other, -1.0)
            }
            ([(u, a), (v, b)], [(i, j, p)])
                if *a != 0.0
                    && a == b
                    && *p == -*a
                    && self.rhs == *a
                    && ((u == i && v == j) || (u == j && v == i))
                    && u != v =>
            {
                Constraint::new(self.label.clone(), Sense::Ge, 1.0)
                    .term(*u, 1.0)
                    .term(*v, 1.0)
            }
            _ => self.clone(),
        }
    }
}

/// Constraint `sum_{y=1} (1 - y) + sum_{y=0} y >= 1` over `over`, which
/// excludes the restriction of `assignment` to that subset.
pub fn no_good_cut(assignment: &[bool], over: &[usize]) -> Result<Constraint> {
    if over.is_empty() {
        return Err(Error::Argument("no-good cut over an empty subset".into()));
    }
    let mut cut = Constraint::new(format!("no_good_{}", cut_tag(assignment, over)), Sense::Ge, 1.0);
    for &v in over {
        let Some(&value) = assignment.get(v) else {
            return Err(Error::Dimension {
                expected: v + 1,
                got: assignment.len(),
            });
        };
        if value {
            cut = cut.term(v, -1.0);
            cut.rhs -= 1.0;
        } else {
            cut = cut.term(v, 1.0);
        }
    }
    Ok(cut)
}

fn cut_tag(assignment: &[bool], over: &[usize]) -> String {
    over.iter()
        .map(|&v| match assignment.get(v) {
            Some(true) => '1',
            Some(false) => '0',
            None => '?',
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BinaryProgram {
    var_names: Vec<String>,
    objective: Vec<f64>,
    objective_constant: f64,
    constraints: Vec<Constraint>,
    projection: Vec<usize>,
}

impl BinaryProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> Result<usize> {
        let name = name.into();
        if self.var_names.contains(&name) {
            return Err(Error::Model(format!("duplicate variable {name:?}")));
        }
        self.var_names.push(name);
        self.objective.push(0.0);
        Ok(self.var_names.len() - 1)
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.var_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Model(format!("unknown variable {name:?}")))
    }

    pub fn set_cost(&mut self, var: usize, cost: f64) -> Result<()> {
        self.check_var(var)?;
        self.objective[var] = cost;
        Ok(())
    }

    pub fn set_objective_constant(&mut self, c: f64) {
        self.objective_constant = c;
    }

    pub fn add_constraint(&mut self, c: Constraint) -> Result<()> {
        for v in c.support() {
            self.check_var(v)?;
        }
        if let Some(&(a, _, _)) = c.products.iter().find(|(a, b, _)| a == b) {
            return Err(Error::Model(format!(
                "constraint {:?}: product of {:?} with itself",
                c.label, self.var_names[a]
            )));
        }
        if !c.rhs.is_finite()
            || c.linear.iter().any(|(_, k)| !k.is_finite())
            || c.products.iter().any(|(_, _, k)| !k.is_finite())
        {
            return Err(Error::Model(format!(
                "constraint {:?}: non-finite coefficient",
                c.label
            )));
        }
        self.constraints.push(c);
        Ok(())
    }

    pub fn set_projection(&mut self, vars: Vec<usize>) -> Result<()> {
        for &v in &vars {
            self.check_var(v)?;
        }
        let mut sorted = vars.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != vars.len() {
            return Err(Error::Model("projection lists a variable twice".into()));
        }
        self.projection = vars;
        Ok(())
    }

    fn check_var(&self, v: usize) -> Result<()> {
        if v < self.var_names.len() {
            Ok(())
        } else {
            Err(Error::Model(format!("unknown variable index {v}")))
        }
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn costs(&self) -> &[f64] {
        &self.objective
    }

    pub fn objective_constant(&self) -> f64 {
        self.objective_constant
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Projection variables; an empty projection means "all variables".
    pub fn projection(&self) -> Vec<usize> {
        if self.projection.is_empty() {
            (0..self.num_vars()).collect()
        } else {
            self.projection.clone()
        }
    }

    fn check_len(&self, x: &[bool]) -> Result<()> {
        if x.len() == self.num_vars() {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.num_vars(),
                got: x.len(),
            })
        }
    }

    pub fn is_feasible(&self, x: &[bool]) -> Result<Feasibility> {
        self.check_len(x)?;
        let violations: Vec<String> = self
            .constraints
            .iter()
            .filter(|c| !c.is_satisfied(x))
            .map(|c| c.label.clone())
            .collect();
        Ok(Feasibility {
            feasible: violations.is_empty(),
            violations,
        })
    }

    pub(crate) fn feasible_unchecked(&self, x: &[bool]) -> bool {
        self.constraints.iter().all(|c| c.is_satisfied(x))
    }

    pub fn objective_value(&self, x: &[bool]) -> Result<f64> {
        self.check_len(x)?;
        Ok(self.objective_unchecked(x))
    }

    pub(crate) fn objective_unchecked(&self, x: &[bool]) -> f64 {
        self.objective_constant
            + self
                .objective
                .iter()
                .zip(x)
                .filter(|(_, &b)| b)
                .map(|(c, _)| c)
                .sum::<f64>()
    }

    /// Projection bits as a string; the configuration identifier.
    pub fn config_key(&self, x: &[bool]) -> String {
        let bits: Vec<bool> = self.projection().iter().map(|&v| x[v]).collect();
        bits_to_string(&bits)
    }

    /// Copy of the program with one more constraint.
    pub fn with_constraint(&self, c: Constraint) -> Result<BinaryProgram> {
        let mut p = self.clone();
        p.add_constraint(c)?;
        Ok(p)
    }

    pub fn normalized(&self) -> BinaryProgram {
        let mut p = self.clone();
        p.constraints = self.constraints.iter().map(Constraint::normalized).collect();
        p
    }

    pub fn to_json(&self) -> Result<String> {
        let name = |v: usize| self.var_names[v].clone();
        let file = ProgramFile {
            var_names: self.var_names.clone(),
            objective: ObjectiveFile {
                terms: self
                    .objective
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0.0)
                    .map(|(v, &c)| (name(v), c))
                    .collect(),
                constant: self.objective_constant,
            },
            constraints: self
                .constraints
                .iter()
                .map(|c| ConstraintFile {
                    label: c.label.clone(),
                    linear: c.linear.iter().map(|&(v, k)| (name(v), k)).collect(),
                    products: c.products.iter().map(|&(a, b, k)| (name(a), name(b), k)).collect(),
                    sense: c.sense,
                    rhs: c.rhs,
                })
                .collect(),
            projection: self.projection.iter().map(|&v| name(v)).collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: ProgramFile = serde_json::from_str(s)?;
        let schema = |e: Error| Error::Schema(e.to_string());
        let mut p = BinaryProgram::new();
        for n in &file.var_names {
            p.add_var(n.clone()).map_err(schema)?;
        }
        for (n, c) in &file.objective.terms {
            let v = p.var_index(n).map_err(schema)?;
            p.set_cost(v, *c).map_err(schema)?;
        }
        p.objective_constant = file.objective.constant;
        for cf in &file.constraints {
            let mut c = Constraint::new(cf.label.clone(), cf.sense, cf.rhs);
            for (n, k) in &cf.linear {
                c = c.term(p.var_index(n).map_err(schema)?, *k);
            }
            for (a, b, k) in &cf.products {
                c = c.product(p.var_index(a).map_err(schema)?, p.var_index(b).map_err(schema)?, *k);
            }
            p.add_constraint(c).map_err(schema)?;
        }
        let proj = file
            .projection
            .iter()
            .map(|n| p.var_index(n))
            .collect::<Result<Vec<_>>>()
            .map_err(schema)?;
        p.set_projection(proj).map_err(schema)?;
        Ok(p)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProgramFile {
    var_names: Vec<String>,
    objective: ObjectiveFile,
    constraints: Vec<ConstraintFile>,
    #[serde(default)]
    projection: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectiveFile {
    terms: BTreeMap<String, f64>,
    #[serde(default)]
    constant: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintFile {
    label: String,
    #[serde(default)]
    linear: BTreeMap<String, f64>,
    #[serde(default)]
    products: Vec<(String, String, f64)>,
    sense: Sense,
    rhs: f64,
}
