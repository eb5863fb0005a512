//! Discrete engines and their common output type.
//!
//! * [`exhaustive`]: complete enumeration, the ground-truth oracle.
//! * [`eliminate`]: exact QUBO minimization by variable elimination, for
//!   models too wide to enumerate but with small interaction width.
//! * [`anneal`]: single-flip Metropolis simulated annealing.
//! * [`bnb`]: depth-first branch-and-bound with optimal, enumerate-all
//!   (no-good cuts) and solution-pool modes.

pub mod anneal;
pub mod bnb;
pub mod eliminate;
pub mod exhaustive;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::qubo::QuboModel;
use crate::{bits_from_str, bits_to_string, Error, Result};

/// Stated energies farther than this from the recomputed value are flagged.
pub const IMPORT_ENERGY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub assignment: Vec<bool>,
    pub energy: f64,
    pub objective: Option<f64>,
    pub feasible: bool,
    pub occurrences: u64,
    /// Projected configuration identifier, filled once the record is decoded
    /// against a program and found feasible.
    pub config: Option<String>,
}

impl Record {
    pub fn new(assignment: Vec<bool>, energy: f64) -> Self {
        Self {
            assignment,
            energy,
            objective: None,
            feasible: false,
            occurrences: 1,
            config: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Ok,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub solver: String,
    pub seed: Option<u64>,
    pub tau_seconds: f64,
    pub records: Vec<Record>,
    pub status: SolveStatus,
    /// Deterministic engines reach the same result on every run.
    pub deterministic: bool,
    /// Free-form solver metadata (schedules, iteration counts, penalty weights).
    pub metadata: BTreeMap<String, Value>,
    /// Passthrough for externally reported timing decompositions.
    pub time_breakdown: Option<Value>,
}

impl SampleSet {
    pub fn new(solver: impl Into<String>) -> Self {
        Self {
            solver: solver.into(),
            seed: None,
            tau_seconds: 0.0,
            records: Vec::new(),
            status: SolveStatus::Ok,
            deterministic: false,
            metadata: BTreeMap::new(),
            time_breakdown: None,
        }
    }

    /// Merges duplicate assignments (summing occurrences) and sorts by
    /// energy, ties broken by the lexicographically smaller assignment.
    pub fn normalize(&mut self) {
        let mut merged: BTreeMap<Vec<bool>, Record> = BTreeMap::new();
        for r in self.records.drain(..) {
            match merged.get_mut(&r.assignment) {
                Some(existing) => existing.occurrences += r.occurrences,
                None => {
                    merged.insert(r.assignment.clone(), r);
                }
            }
        }
        self.records = merged.into_values().collect();
        self.records.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then_with(|| a.assignment.cmp(&b.assignment))
        });
    }

    pub fn total_reads(&self) -> u64 {
        self.records.iter().map(|r| r.occurrences).sum()
    }

    pub fn lowest_energy(&self) -> Option<f64> {
        self.records.first().map(|r| r.energy)
    }

    pub fn best_feasible(&self) -> Option<&Record> {
        self.records.iter().filter(|r| r.feasible).min_by(|a, b| {
            let (oa, ob) = (a.objective.unwrap_or(a.energy), b.objective.unwrap_or(b.energy));
            oa.total_cmp(&ob).then_with(|| a.assignment.cmp(&b.assignment))
        })
    }

    /// Distinct configuration identifiers among feasible records.
    pub fn feasible_configs(&self) -> std::collections::BTreeSet<String> {
        self.records
            .iter()
            .filter(|r| r.feasible)
            .filter_map(|r| r.config.clone())
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let file = SampleFile {
            solver: self.solver.clone(),
            seed: self.seed,
            tau_seconds: self.tau_seconds,
            status: Some(self.status),
            deterministic: self.deterministic,
            metadata: self.metadata.clone(),
            time_breakdown: self.time_breakdown.clone(),
            records: self
                .records
                .iter()
                .map(|r| RecordFile {
                    assignment: bits_to_string(&r.assignment),
                    energy: r.energy,
                    objective: r.objective,
                    feasible: r.feasible,
                    occurrences: r.occurrences,
                    config: r.config.clone(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Parses and validates a sample file, then merges duplicates and re-sorts.
    pub fn from_json(s: &str) -> Result<Self> {
        let file: SampleFile = serde_json::from_str(s)?;
        if !(file.tau_seconds.is_finite() && file.tau_seconds >= 0.0) {
            return Err(Error::Schema("tau_seconds must be a finite non-negative number".into()));
        }
        let width = file.records.first().map(|r| r.assignment.len());
        let mut records = Vec::with_capacity(file.records.len());
        for (k, r) in file.records.into_iter().enumerate() {
            let assignment = bits_from_str(&r.assignment)?;
            if Some(assignment.len()) != width {
                return Err(Error::Schema(format!("record {k} has a different assignment width")));
            }
            if r.occurrences == 0 {
                return Err(Error::Schema(format!("record {k} has zero occurrences")));
            }
            if !r.energy.is_finite() || r.objective.is_some_and(|o| !o.is_finite()) {
                return Err(Error::Schema(format!("record {k} has a non-finite value")));
            }
            records.push(Record {
                assignment,
                energy: r.energy,
                objective: r.objective,
                feasible: r.feasible,
                occurrences: r.occurrences,
                config: r.config,
            });
        }
        let mut set = SampleSet {
            solver: file.solver,
            seed: file.seed,
            tau_seconds: file.tau_seconds,
            records,
            status: file.status.unwrap_or(SolveStatus::Ok),
            deterministic: file.deterministic,
            metadata: file.metadata,
            time_breakdown: file.time_breakdown,
        };
        set.normalize();
        Ok(set)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleFile {
    solver: String,
    seed: Option<u64>,
    tau_seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    status: Option<SolveStatus>,
    #[serde(default)]
    deterministic: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    time_breakdown: Option<Value>,
    records: Vec<RecordFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordFile {
    assignment: String,
    energy: f64,
    #[serde(default)]
    objective: Option<f64>,
    #[serde(default)]
    feasible: bool,
    #[serde(default = "one")]
    occurrences: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config: Option<String>,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq)]
pub struct Import {
    pub samples: SampleSet,
    /// Indices (after normalization) of records whose stated energy disagrees
    /// with the model.
    pub mismatched: Vec<usize>,
}

/// Reads an externally produced sample file. With a model, stated energies
/// are recomputed; mismatches beyond [`IMPORT_ENERGY_TOL`] are listed, and
/// with `strict` they are an error.
pub fn import_samples(path: &Path, model: Option<&QuboModel>, strict: bool) -> Result<Import> {
    import_samples_str(&std::fs::read_to_string(path)?, model, strict)
}

pub fn import_samples_str(text: &str, model: Option<&QuboModel>, strict: bool) -> Result<Import> {
    let samples = SampleSet::from_json(text)?;
    let mut mismatched = Vec::new();
    if let Some(q) = model {
        for (k, r) in samples.records.iter().enumerate() {
            let e = q.energy(&r.assignment)?;
            if (e - r.energy).abs() > IMPORT_ENERGY_TOL {
                mismatched.push(k);
            }
        }
        if strict && !mismatched.is_empty() {
            return Err(Error::EnergyMismatch {
                count: mismatched.len(),
            });
        }
    }
    Ok(Import { samples, mismatched })
}
