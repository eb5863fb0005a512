//! Single-flip Metropolis simulated annealing.
//!
//! Each read starts from a uniformly random state and performs `num_sweeps`
//! sweeps in index order under a geometric inverse-temperature schedule.
//! Read `k` draws from its own ChaCha stream (`seed`, stream `k`), so reads
//! run in parallel yet the merged result depends only on the seed.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::{Record, SampleSet};
use crate::qubo::QuboModel;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SaParams {
    pub num_reads: usize,
    pub num_sweeps: usize,
    /// Initial inverse temperature; `None` uses `0.1 / max |dE|`.
    pub beta_hot: Option<f64>,
    /// Final inverse temperature; `None` uses `10 / min nonzero |dE|`.
    pub beta_cold: Option<f64>,
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            num_reads: 1000,
            num_sweeps: 1000,
            beta_hot: None,
            beta_cold: None,
            seed: 0,
        }
    }
}

/// Resolved schedule endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub beta_hot: f64,
    pub beta_cold: f64,
}

impl Schedule {
    pub fn beta(&self, sweep: usize, num_sweeps: usize) -> f64 {
        if num_sweeps <= 1 {
            return self.beta_cold;
        }
        let t = sweep as f64 / (num_sweeps - 1) as f64;
        self.beta_hot * (self.beta_cold / self.beta_hot).powf(t)
    }
}

pub fn resolve_schedule(q: &QuboModel, params: &SaParams) -> Result<Schedule> {
    let compiled = q.compile();
    let max_delta = compiled.max_flip_delta();
    let min_delta = compiled.min_nonzero_coefficient();
    let beta_hot = params
        .beta_hot
        .unwrap_or(if max_delta > 0.0 { 0.1 / max_delta } else { 0.1 });
    let beta_cold = params.beta_cold.unwrap_or(min_delta.map_or(10.0, |d| 10.0 / d));
    if !(beta_hot.is_finite() && beta_cold.is_finite() && beta_hot > 0.0 && beta_hot < beta_cold) {
        return Err(Error::Argument(format!(
            "need 0 < beta_hot < beta_cold, got {beta_hot} and {beta_cold}"
        )));
    }
    Ok(Schedule { beta_hot, beta_cold })
}

/// Flat adjacency for the inner loop.
struct Csr {
    linear: Vec<f64>,
    start: Vec<usize>,
    nbr: Vec<usize>,
    weight: Vec<f64>,
}

impl Csr {
    fn new(q: &QuboModel) -> Self {
        let compiled = q.compile();
        let mut start = vec![0];
        let mut nbr = Vec::new();
        let mut weight = Vec::new();
        for list in &compiled.neighbors {
            for &(j, w) in list {
                nbr.push(j);
                weight.push(w);
            }
            start.push(nbr.len());
        }
        Self {
            linear: compiled.linear,
            start,
            nbr,
            weight,
        }
    }

    fn read(&self, rng: &mut ChaCha8Rng, betas: &[f64]) -> Vec<bool> {
        let n = self.linear.len();
        let mut x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let mut field = self.linear.clone();
        for i in (0..n).filter(|&i| x[i]) {
            for k in self.start[i]..self.start[i + 1] {
                field[self.nbr[k]] += self.weight[k];
            }
        }
        for &beta in betas {
            for i in 0..n {
                let delta = if x[i] { -field[i] } else { field[i] };
                let accept = delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp();
                if accept {
                    x[i] = !x[i];
                    let sign = if x[i] { 1.0 } else { -1.0 };
                    for k in self.start[i]..self.start[i + 1] {
                        field[self.nbr[k]] += sign * self.weight[k];
                    }
                }
            }
        }
        x
    }
}

pub fn simulated_annealing(q: &QuboModel, params: &SaParams) -> Result<SampleSet> {
    if params.num_reads == 0 || params.num_sweeps == 0 {
        return Err(Error::Argument("num_reads and num_sweeps must be at least 1".into()));
    }
    let schedule = resolve_schedule(q, params)?;
    let betas: Vec<f64> = (0..params.num_sweeps)
        .map(|t| schedule.beta(t, params.num_sweeps))
        .collect();
    let start = Instant::now();
    let csr = Csr::new(q);
    let finals: Vec<Vec<bool>> = (0..params.num_reads)
        .into_par_iter()
        .map(|read| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(read as u64);
            csr.read(&mut rng, &betas)
        })
        .collect();
    let mut set = SampleSet::new("sa");
    set.records = finals
        .into_iter()
        .map(|x| {
            let e = q.energy_unchecked(&x);
            Record::new(x, e)
        })
        .collect();
    set.normalize();
    set.tau_seconds = start.elapsed().as_secs_f64();
    set.seed = Some(params.seed);
    set.metadata.insert("num_reads".into(), json!(params.num_reads));
    set.metadata.insert("num_sweeps".into(), json!(params.num_sweeps));
    set.metadata.insert("beta_schedule".into(), json!("geometric"));
    set.metadata.insert("beta_hot".into(), json!(schedule.beta_hot));
    set.metadata.insert("beta_cold".into(), json!(schedule.beta_cold));
    set.metadata.insert(
        "beta_source".into(),
        json!(if params.beta_hot.is_none() && params.beta_cold.is_none() {
            "default: 0.1/max|dE| to 10/min|dE|"
        } else {
            "user"
        }),
    );
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_qubo(n: usize, seed: u64) -> QuboModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut q = QuboModel::new(n);
        for i in 0..n {
            for j in i..n {
                if rng.gen_bool(0.5) {
                    q.add_term(i, j, rng.gen_range(-4.0..4.0)).unwrap();
                }
            }
        }
        q
    }

    #[test]
    fn flat_landscape_returns_offset() {
        let mut q = QuboModel::new(5);
        q.add_offset(2.5);
        let s = simulated_annealing(
            &q,
            &SaParams {
                num_reads: 50,
                num_sweeps: 10,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(s.records.iter().all(|r| r.energy == 2.5));
        assert_eq!(s.total_reads(), 50);
    }

    #[test]
    fn same_seed_same_samples() {
        let q = random_qubo(12, 3);
        let p = SaParams {
            num_reads: 64,
            num_sweeps: 50,
            seed: 99,
            ..Default::default()
        };
        let a = simulated_annealing(&q, &p).unwrap();
        let b = simulated_annealing(&q, &p).unwrap();
        assert_eq!(a.records, b.records);
    }

    #[test]
    fn cold_terminal_states_are_local_minima() {
        for seed in 0..10 {
            let q = random_qubo(10, seed);
            let compiled = q.compile();
            let s = simulated_annealing(
                &q,
                &SaParams {
                    num_reads: 1,
                    num_sweeps: 2000,
                    beta_hot: Some(1e-2),
                    beta_cold: Some(1e9),
                    seed,
                },
            )
            .unwrap();
            let x = &s.records[0].assignment;
            for i in 0..10 {
                let f = compiled.local_field(i, x);
                let delta = if x[i] { -f } else { f };
                assert!(delta >= -1e-12, "flip {i} improves by {delta}");
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let q = random_qubo(4, 1);
        for p in [
            SaParams {
                num_reads: 0,
                ..Default::default()
            },
            SaParams {
                beta_hot: Some(2.0),
                beta_cold: Some(1.0),
                ..Default::default()
            },
        ] {
            assert!(simulated_annealing(&q, &p).is_err());
        }
    }

    #[test]
    fn schedule_endpoints() {
        let s = Schedule {
            beta_hot: 0.1,
            beta_cold: 10.0,
        };
        assert!((s.beta(0, 5) - 0.1).abs() < 1e-15);
        assert!((s.beta(4, 5) - 10.0).abs() < 1e-12);
        assert!((s.beta(2, 5) - 1.0).abs() < 1e-12);
    }
}
