//! QUBO and Ising models.
//!
//! A [`QuboModel`] stores `E(x) = sum_{i<=j} q_ij x_i x_j + offset` over
//! binary `x`, upper-triangular and sparse. Diagonal entries act linearly
//! because `x_i^2 = x_i`. An [`IsingModel`] stores
//! `H(s) = sum_i h_i s_i + sum_{i<j} J_ij s_i s_j + offset` over spins
//! `s_i in {-1, +1}`; the two are related by `s = 2x - 1`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance for QUBO/Ising energy equivalence.
pub const CONVERSION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    num_vars: usize,
    terms: BTreeMap<(usize, usize), f64>,
    offset: f64,
    var_names: Vec<String>,
}

impl QuboModel {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            terms: BTreeMap::new(),
            offset: 0.0,
            var_names: Vec::new(),
        }
    }

    /// Builds a model from a dense square matrix. `q[i][j]` and `q[j][i]`
    /// are folded into the single upper-triangular entry.
    pub fn from_dense(q: &[Vec<f64>], offset: f64) -> Result<Self> {
        let n = q.len();
        let mut model = Self::new(n);
        for (i, row) in q.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                model.add_term(i, j, v)?;
            }
        }
        model.offset = offset;
        Ok(model)
    }

    /// Adds `coeff * x_i * x_j`. Indices are folded into `(min, max)`; terms
    /// that cancel to exactly zero are dropped.
    pub fn add_term(&mut self, i: usize, j: usize, coeff: f64) -> Result<()> {
        if i >= self.num_vars || j >= self.num_vars {
            return Err(Error::Model(format!(
                "term ({i}, {j}) out of range for {} variables",
                self.num_vars
            )));
        }
        if !coeff.is_finite() {
            return Err(Error::Model(format!("non-finite coefficient at ({i}, {j})")));
        }
        if coeff == 0.0 {
            return Ok(());
        }
        let key = (i.min(j), i.max(j));
        let entry = self.terms.entry(key).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn add_linear(&mut self, i: usize, coeff: f64) -> Result<()> {
        self.add_term(i, i, coeff)
    }

    pub fn add_offset(&mut self, c: f64) {
        self.offset += c;
    }

    pub fn set_var_names(&mut self, names: Vec<String>) -> Result<()> {
        if !names.is_empty() && names.len() != self.num_vars {
            return Err(Error::Dimension {
                expected: self.num_vars,
                got: names.len(),
            });
        }
        self.var_names = names;
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    /// Upper-triangular terms in `(i, j)` order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.terms.iter().map(|(&(i, j), &q)| (i, j, q))
    }

    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        self.terms.get(&(i.min(j), i.max(j))).copied().unwrap_or(0.0)
    }

    pub fn energy(&self, x: &[bool]) -> Result<f64> {
        if x.len() != self.num_vars {
            return Err(Error::Dimension {
                expected: self.num_vars,
                got: x.len(),
            });
        }
        Ok(self.energy_unchecked(x))
    }

    pub(crate) fn energy_unchecked(&self, x: &[bool]) -> f64 {
        let mut e = self.offset;
        for (&(i, j), &q) in &self.terms {
            if x[i] && x[j] {
                e += q;
            }
        }
        e
    }

    pub fn to_ising(&self) -> IsingModel {
        let mut ising = IsingModel::new(self.num_vars);
        ising.offset = self.offset;
        for (&(i, j), &q) in &self.terms {
            if i == j {
                // q x = q (s + 1) / 2
                *ising.h.entry(i).or_insert(0.0) += q / 2.0;
                ising.offset += q / 2.0;
            } else {
                // q x_i x_j = q (s_i s_j + s_i + s_j + 1) / 4
                *ising.j.entry((i, j)).or_insert(0.0) += q / 4.0;
                *ising.h.entry(i).or_insert(0.0) += q / 4.0;
                *ising.h.entry(j).or_insert(0.0) += q / 4.0;
                ising.offset += q / 4.0;
            }
        }
        ising.h.retain(|_, v| *v != 0.0);
        ising
    }

    pub fn from_ising(model: &IsingModel) -> QuboModel {
        model.to_qubo()
    }

    /// Flattened representation used by the sampling and enumeration engines.
    pub fn compile(&self) -> CompiledQubo {
        CompiledQubo::new(self)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = QuboFile {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(&(i, j), &q)| (i, j, q)).collect(),
            offset: self.offset,
            var_names: self.var_names.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: QuboFile = serde_json::from_str(s)?;
        let mut model = QuboModel::new(file.num_vars);
        for (i, j, q) in file.terms {
            model.add_term(i, j, q).map_err(|e| Error::Schema(e.to_string()))?;
        }
        if !file.offset.is_finite() {
            return Err(Error::Schema("offset must be finite".into()));
        }
        model.offset = file.offset;
        model
            .set_var_names(file.var_names)
            .map_err(|e| Error::Schema(e.to_string()))?;
        Ok(model)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuboFile {
    num_vars: usize,
    terms: Vec<(usize, usize, f64)>,
    offset: f64,
    #[serde(default)]
    var_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    num_spins: usize,
    h: BTreeMap<usize, f64>,
    j: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl IsingModel {
    pub fn new(num_spins: usize) -> Self {
        Self {
            num_spins,
            h: BTreeMap::new(),
            j: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn num_spins(&self) -> usize {
        self.num_spins
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn set_offset(&mut self, offset: f64) {
        self.offset = offset;
    }

    pub fn add_field(&mut self, i: usize, h: f64) -> Result<()> {
        if i >= self.num_spins {
            return Err(Error::Model(format!("spin {i} out of range")));
        }
        *self.h.entry(i).or_insert(0.0) += h;
        Ok(())
    }

    pub fn add_coupling(&mut self, i: usize, j: usize, coupling: f64) -> Result<()> {
        if i == j {
            return Err(Error::Model(format!("self-coupling on spin {i}")));
        }
        if i >= self.num_spins || j >= self.num_spins {
            return Err(Error::Model(format!("coupling ({i}, {j}) out of range")));
        }
        *self.j.entry((i.min(j), i.max(j))).or_insert(0.0) += coupling;
        Ok(())
    }

    pub fn fields(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.h.iter().map(|(&i, &v)| (i, v))
    }

    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.j.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    /// Energy at a spin configuration; `true` maps to `+1`.
    pub fn energy(&self, spins: &[bool]) -> Result<f64> {
        if spins.len() != self.num_spins {
            return Err(Error::Dimension {
                expected: self.num_spins,
                got: spins.len(),
            });
        }
        let s = |i: usize| if spins[i] { 1.0 } else { -1.0 };
        let mut e = self.offset;
        for (&i, &h) in &self.h {
            e += h * s(i);
        }
        for (&(i, j), &c) in &self.j {
            e += c * s(i) * s(j);
        }
        Ok(e)
    }

    pub fn to_qubo(&self) -> QuboModel {
        let mut q = QuboModel::new(self.num_spins);
        q.offset = self.offset;
        for (&i, &h) in &self.h {
            // h s = 2 h x - h
            q.add_term(i, i, 2.0 * h).expect("index checked on insert");
            q.offset -= h;
        }
        for (&(i, j), &c) in &self.j {
            // c s_i s_j = c (4 x_i x_j - 2 x_i - 2 x_j + 1)
            q.add_term(i, j, 4.0 * c).expect("index checked on insert");
            q.add_term(i, i, -2.0 * c).expect("index checked on insert");
            q.add_term(j, j, -2.0 * c).expect("index checked on insert");
            q.offset += c;
        }
        q
    }
}

/// Dense linear part plus symmetric adjacency lists.
#[derive(Debug, Clone)]
pub struct CompiledQubo {
    pub linear: Vec<f64>,
    /// `neighbors[i]` lists `(j, q_ij)` for every off-diagonal term touching `i`.
    pub neighbors: Vec<Vec<(usize, f64)>>,
    pub offset: f64,
}

impl CompiledQubo {
    fn new(model: &QuboModel) -> Self {
        let n = model.num_vars;
        let mut linear = vec![0.0; n];
        let mut neighbors = vec![Vec::new(); n];
        for (&(i, j), &q) in &model.terms {
            if i == j {
                linear[i] += q;
            } else {
                neighbors[i].push((j, q));
                neighbors[j].push((i, q));
            }
        }
        Self {
            linear,
            neighbors,
            offset: model.offset,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    /// Local field `l_i + sum_j q_ij x_j`; flipping `x_i` from 0 to 1 changes
    /// the energy by exactly this amount.
    pub fn local_field(&self, i: usize, x: &[bool]) -> f64 {
        self.linear[i]
            + self.neighbors[i]
                .iter()
                .filter(|&&(j, _)| x[j])
                .map(|&(_, q)| q)
                .sum::<f64>()
    }

    pub fn energy(&self, x: &[bool]) -> f64 {
        let mut e = self.offset;
        for i in 0..x.len() {
            if x[i] {
                e += self.linear[i];
                for &(j, q) in &self.neighbors[i] {
                    if j > i && x[j] {
                        e += q;
                    }
                }
            }
        }
        e
    }

    /// Largest possible single-flip energy change (upper estimate).
    pub fn max_flip_delta(&self) -> f64 {
        (0..self.num_vars())
            .map(|i| self.linear[i].abs() + self.neighbors[i].iter().map(|(_, q)| q.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Smallest nonzero coefficient magnitude, used as the finest energy scale.
    pub fn min_nonzero_coefficient(&self) -> Option<f64> {
        self.linear
            .iter()
            .chain(self.neighbors.iter().flatten().map(|(_, q)| q))
            .map(|q| q.abs())
            .filter(|&q| q > 0.0)
            .reduce(f64::min)
    }
}
