//! Multi-start bounded coordinate pattern search with extreme-barrier
//! constraint handling.
//!
//! Each start polls `x ± h·e_i` (clamped to the box) coordinate by
//! coordinate and moves to the first strictly better point. A poll with no
//! improvement halves `h`; the start ends when such a poll happens at
//! `h < min_mesh`. Infeasible and failed evaluations are rejected outright.
//! The evaluation budget is shared across starts in order, so a larger
//! budget extends the same trace and never worsens the best value.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Outcome of one black-box evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum Evaluation {
    Ok(f64),
    /// A constraint is violated; the point is rejected.
    Infeasible,
    /// The evaluator itself failed (for example a simulation crash).
    Failed(String),
}

/// An opaque, deterministic objective over a box, parameterized by a
/// discrete configuration. Scores are minimized; negate maximization
/// targets.
pub trait BlackBoxObjective: Sync {
    fn bounds(&self, config: &str) -> Vec<(f64, f64)>;

    fn evaluate(&self, config: &str, x: &[f64]) -> Evaluation;

    /// First start point; defaults to the box centre.
    fn start_point(&self, config: &str) -> Option<Vec<f64>> {
        let _ = config;
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    pub starts: usize,
    /// Total evaluations across all starts.
    pub budget: usize,
    pub shrink: f64,
    pub min_mesh: f64,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            starts: 20,
            budget: 20_000,
            shrink: 0.5,
            min_mesh: 1e-6,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    Ok,
    NoFeasibleEvaluation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub status: SearchStatus,
    pub best_point: Option<Vec<f64>>,
    pub best_score: Option<f64>,
    pub evaluations: usize,
    /// First evaluator failure, with the point that triggered it.
    pub first_failure: Option<(Vec<f64>, String)>,
}

struct Tracker<'a> {
    objective: &'a dyn BlackBoxObjective,
    config: &'a str,
    budget: usize,
    used: usize,
    best: Option<(f64, Vec<f64>)>,
    first_failure: Option<(Vec<f64>, String)>,
}

impl Tracker<'_> {
    /// `None` once the budget is exhausted; `+inf` for rejected points.
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.used >= self.budget {
            return None;
        }
        self.used += 1;
        let score = match self.objective.evaluate(self.config, x) {
            Evaluation::Ok(v) if v.is_finite() => v,
            Evaluation::Ok(_) | Evaluation::Infeasible => f64::INFINITY,
            Evaluation::Failed(reason) => {
                if self.first_failure.is_none() {
                    self.first_failure = Some((x.to_vec(), reason));
                }
                f64::INFINITY
            }
        };
        if score.is_finite() && self.best.as_ref().is_none_or(|(b, _)| score < *b) {
            self.best = Some((score, x.to_vec()));
        }
        Some(score)
    }
}

fn local_search(t: &mut Tracker, bounds: &[(f64, f64)], start: Vec<f64>, opts: &SearchOptions) {
    let Some(mut score) = t.eval(&start) else { return };
    let mut x = start;
    let width = bounds.iter().map(|(lo, hi)| hi - lo).fold(0.0, f64::max);
    let mut h = if width > 0.0 { 0.5 * width } else { opts.min_mesh };
    loop {
        let mut improved = false;
        'poll: for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let trial_coord = (x[i] + dir * h).clamp(bounds[i].0, bounds[i].1);
                if trial_coord == x[i] {
                    continue;
                }
                let mut trial = x.clone();
                trial[i] = trial_coord;
                let Some(s) = t.eval(&trial) else { return };
                if s < score {
                    x = trial;
                    score = s;
                    improved = true;
                    break 'poll;
                }
            }
        }
        if !improved {
            if h < opts.min_mesh {
                return;
            }
            h *= opts.shrink;
        }
    }
}

/// Runs the search for one configuration. Start 0 is the objective's
/// preferred start (or the box centre); the rest are seeded uniform draws.
pub fn run_blackbox(objective: &dyn BlackBoxObjective, config: &str, opts: &SearchOptions) -> SearchResult {
    let bounds = objective.bounds(config);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut tracker = Tracker {
        objective,
        config,
        budget: opts.budget,
        used: 0,
        best: None,
        first_failure: None,
    };
    for start in 0..opts.starts.max(1) {
        if tracker.used >= tracker.budget {
            break;
        }
        let x0 = if start == 0 {
            objective
                .start_point(config)
                .unwrap_or_else(|| bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect())
        } else {
            bounds
                .iter()
                .map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
                .collect()
        };
        local_search(&mut tracker, &bounds, x0, opts);
    }
    let (best_score, best_point) = match tracker.best {
        Some((s, x)) => (Some(s), Some(x)),
        None => (None, None),
    };
    SearchResult {
        status: if best_score.is_some() {
            SearchStatus::Ok
        } else {
            SearchStatus::NoFeasibleEvaluation
        },
        best_point,
        best_score,
        evaluations: tracker.used,
        first_failure: tracker.first_failure,
    }
}
