//! Time-to-target, success probabilities, solution diversity and Pareto
//! fronts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::solvers::SampleSet;
use crate::{Error, Result, TOL};

pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// Expected time to reach a target with confidence `s` when one run of
/// length `tau` succeeds with probability `p`.
pub fn ttt(tau: f64, p: f64, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Argument(format!("confidence s must lie in (0, 1), got {s}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Argument(format!("probability must lie in [0, 1], got {p}")));
    }
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::Argument(format!(
            "tau must be finite and non-negative, got {tau}"
        )));
    }
    Ok(if p == 1.0 {
        tau
    } else if p == 0.0 {
        f64::INFINITY
    } else {
        tau * (1.0 - s).ln() / (1.0 - p).ln()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    /// Any read with energy at most `e* + 1e-9`.
    Optimal(f64),
    /// Every configuration in the reference set among decoded feasible reads.
    AllFeasible(BTreeSet<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// Fraction of reads (or hit/miss for a deterministic engine).
    Count,
    /// The run itself reached the target.
    Observed,
    /// Resampling the run's reads with replacement.
    Bootstrap,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuccessEstimate {
    pub p: f64,
    pub estimator: Estimator,
    /// 95% Wilson interval, bootstrap estimates only.
    pub interval: Option<(f64, f64)>,
}

fn wilson(successes: usize, trials: usize) -> (f64, f64) {
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z = 1.959_963_984_540_054_f64;
    let denom = 1.0 + z * z / n;
    let centre = (phat + z * z / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    // The bounds are exact at the edges; rounding would otherwise leave
    // them a hair off 0 or 1.
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

/// Probability that a single run reaches `target`.
pub fn estimate_success(samples: &SampleSet, target: &Target, seed: u64) -> Result<SuccessEstimate> {
    if samples.records.is_empty() {
        return Err(Error::EmptySamples);
    }
    match target {
        Target::Optimal(e_star) => {
            let hit = |e: f64| e <= e_star + TOL;
            let p = if samples.deterministic {
                if samples.records.iter().any(|r| hit(r.energy)) {
                    1.0
                } else {
                    0.0
                }
            } else {
                let hits: u64 = samples
                    .records
                    .iter()
                    .filter(|r| hit(r.energy))
                    .map(|r| r.occurrences)
                    .sum();
                hits as f64 / samples.total_reads() as f64
            };
            Ok(SuccessEstimate {
                p,
                estimator: Estimator::Count,
                interval: None,
            })
        }
        Target::AllFeasible(reference) => {
            let found = samples.feasible_configs();
            if reference.is_subset(&found) {
                return Ok(SuccessEstimate {
                    p: 1.0,
                    estimator: Estimator::Observed,
                    interval: None,
                });
            }
            let index: BTreeMap<&String, usize> = reference.iter().enumerate().map(|(k, c)| (c, k)).collect();
            let mut reads: Vec<Option<usize>> = Vec::new();
            for r in &samples.records {
                let slot = r
                    .config
                    .as_ref()
                    .filter(|_| r.feasible)
                    .and_then(|c| index.get(c).copied());
                reads.extend(std::iter::repeat_n(slot, r.occurrences as usize));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut seen = vec![false; reference.len()];
            let mut covered = 0;
            for _ in 0..BOOTSTRAP_RESAMPLES {
                seen.iter_mut().for_each(|s| *s = false);
                let mut distinct = 0;
                for _ in 0..reads.len() {
                    if let Some(k) = reads[rng.gen_range(0..reads.len())] {
                        if !seen[k] {
                            seen[k] = true;
                            distinct += 1;
                        }
                    }
                }
                if distinct == reference.len() {
                    covered += 1;
                }
            }
            Ok(SuccessEstimate {
                p: covered as f64 / BOOTSTRAP_RESAMPLES as f64,
                estimator: Estimator::Bootstrap,
                interval: Some(wilson(covered, BOOTSTRAP_RESAMPLES)),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiversityReport {
    pub found: usize,
    pub total: usize,
    pub coverage: f64,
    /// 1-based oracle ranks of the configurations found, ascending.
    pub ranks_found: Vec<usize>,
    /// Mean 1-based oracle rank of the configurations found; lower means the
    /// solutions cluster near the optimum.
    pub mean_rank: Option<f64>,
    pub bin_width: usize,
    /// `histogram[b]` counts found configurations with rank in
    /// `b*bin_width+1 ..= (b+1)*bin_width`.
    pub histogram: Vec<usize>,
    /// Reads landing on each found configuration, keyed by rank.
    pub reads_by_rank: BTreeMap<usize, u64>,
}

/// Compares the feasible configurations of `samples` with a ranked oracle
/// list (best first).
pub fn diversity(samples: &SampleSet, ranking: &[String], bins: usize) -> Result<DiversityReport> {
    let rank: BTreeMap<&str, usize> = ranking.iter().enumerate().map(|(k, c)| (c.as_str(), k + 1)).collect();
    let mut reads_by_rank: BTreeMap<usize, u64> = BTreeMap::new();
    for r in samples.records.iter().filter(|r| r.feasible) {
        let Some(config) = &r.config else { continue };
        let Some(&k) = rank.get(config.as_str()) else {
            return Err(Error::Mismatch(format!(
                "configuration {config} is not in the reference ranking"
            )));
        };
        *reads_by_rank.entry(k).or_default() += r.occurrences;
    }
    let total = ranking.len();
    let ranks_found: Vec<usize> = reads_by_rank.keys().copied().collect();
    let found = ranks_found.len();
    let bins = bins.clamp(1, total.max(1));
    let bin_width = total.div_ceil(bins).max(1);
    let mut histogram = vec![0; total.div_ceil(bin_width).max(1)];
    for &k in &ranks_found {
        histogram[(k - 1) / bin_width] += 1;
    }
    Ok(DiversityReport {
        found,
        total,
        coverage: if total == 0 { 0.0 } else { found as f64 / total as f64 },
        mean_rank: (found > 0).then(|| ranks_found.iter().sum::<usize>() as f64 / found as f64),
        ranks_found,
        bin_width,
        histogram,
        reads_by_rank,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParetoPoint {
    pub config_id: String,
    pub discrete_objective: f64,
    pub continuous_objective: f64,
}

impl ParetoPoint {
    pub fn new(config_id: impl Into<String>, discrete: f64, continuous: f64) -> Self {
        Self {
            config_id: config_id.into(),
            discrete_objective: discrete,
            continuous_objective: continuous,
        }
    }

    /// Weak domination on both (minimized) axes, strict on at least one.
    pub fn dominates(&self, other: &ParetoPoint) -> bool {
        let (a, b) = (self, other);
        a.discrete_objective <= b.discrete_objective
            && a.continuous_objective <= b.continuous_objective
            && (a.discrete_objective < b.discrete_objective || a.continuous_objective < b.continuous_objective)
    }

    fn same_position(&self, other: &ParetoPoint) -> bool {
        self.discrete_objective == other.discrete_objective && self.continuous_objective == other.continuous_objective
    }
}

/// Non-dominated subset, sorted by discrete objective. Points sharing a
/// position are represented by the smallest `config_id`; points with a
/// non-finite coordinate are ignored.
pub fn pareto_front(points: &[ParetoPoint]) -> Vec<ParetoPoint> {
    let mut sorted: Vec<&ParetoPoint> = points
        .iter()
        .filter(|p| p.discrete_objective.is_finite() && p.continuous_objective.is_finite())
        .collect();
    sorted.sort_by(|a, b| {
        a.discrete_objective
            .total_cmp(&b.discrete_objective)
            .then(a.continuous_objective.total_cmp(&b.continuous_objective))
            .then_with(|| a.config_id.cmp(&b.config_id))
    });
    sorted.dedup_by(|later, earlier| later.same_position(earlier));
    sorted
        .iter()
        .filter(|p| !sorted.iter().any(|q| q.dominates(p)))
        .map(|p| (*p).clone())
        .collect()
}

/// Formats a value for CSV output: shortest round-trip decimal, `inf` for
/// infinity.
pub fn format_number(x: f64) -> String {
    if x.is_infinite() && x > 0.0 {
        "inf".into()
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TttRow {
    pub solver: String,
    pub tau: f64,
    pub p_opt: f64,
    pub ttt_opt: f64,
    /// `None` when the run never covered the reference set (printed as `-`).
    pub ttt_feas: Option<f64>,
    pub p_feas: Option<SuccessEstimate>,
    pub found: usize,
    pub total: usize,
}

pub fn ttt_header(s: f64) -> String {
    let pct = format_number((s * 100.0 * 1e6).round() / 1e6);
    format!("solver,tau,ttopt{pct},ttfeas{pct},coverage")
}

/// TTT table, one row per sample file.
pub fn ttt_csv(rows: &[TttRow], s: f64) -> String {
    let mut out = ttt_header(s);
    out.push('\n');
    for r in rows {
        let feas = r.ttt_feas.map_or("-".to_string(), format_number);
        let _ = writeln!(
            out,
            "{},{},{},{},{}/{}",
            r.solver,
            format_number(r.tau),
            format_number(r.ttt_opt),
            feas,
            r.found,
            r.total
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::Record;

    #[test]
    fn ttt_examples() {
        assert_eq!(ttt(0.003, 1.0, 0.99).unwrap(), 0.003);
        assert!((ttt(1.0, 0.5, 0.99).unwrap() - 6.6439).abs() < 1e-3);
        assert_eq!(ttt(1.0, 0.0, 0.99).unwrap(), f64::INFINITY);
        assert!((ttt(0.34, 0.012, 0.99).unwrap() - 129.6).abs() < 0.1);
        assert!(ttt(1.0, 0.5, 1.0).is_err());
        assert!(ttt(1.0, 0.5, 0.0).is_err());
    }

    fn run(hits: u64, misses: u64) -> SampleSet {
        let mut s = SampleSet::new("sa");
        let mut a = Record::new(vec![false], -1.0);
        a.occurrences = hits;
        let mut b = Record::new(vec![true], 0.0);
        b.occurrences = misses;
        s.records = vec![a, b];
        s
    }

    #[test]
    fn counting_estimator() {
        let p = estimate_success(&run(12, 988), &Target::Optimal(-1.0), 0).unwrap();
        assert_eq!(p.p, 0.012);
        let mut det = run(1, 1);
        det.deterministic = true;
        assert_eq!(estimate_success(&det, &Target::Optimal(-1.0), 0).unwrap().p, 1.0);
        assert_eq!(estimate_success(&det, &Target::Optimal(-2.0), 0).unwrap().p, 0.0);
        assert!(estimate_success(&SampleSet::new("x"), &Target::Optimal(0.0), 0).is_err());
    }

    fn configs(keys: &[(&str, u64)]) -> SampleSet {
        let mut s = SampleSet::new("sa");
        for (k, (key, occ)) in keys.iter().enumerate() {
            let mut r = Record::new(vec![k % 2 == 0, k % 3 == 0, k % 5 == 0], k as f64);
            r.feasible = true;
            r.config = Some(key.to_string());
            r.occurrences = *occ;
            s.records.push(r);
        }
        s
    }

    #[test]
    fn all_feasible_estimates() {
        let reference: BTreeSet<String> = ["00", "01", "10"].iter().map(|s| s.to_string()).collect();
        let full = configs(&[("00", 5), ("01", 3), ("10", 1)]);
        let est = estimate_success(&full, &Target::AllFeasible(reference.clone()), 1).unwrap();
        assert_eq!((est.p, est.estimator), (1.0, Estimator::Observed));
        let partial = configs(&[("00", 5), ("01", 3)]);
        let est = estimate_success(&partial, &Target::AllFeasible(reference), 1).unwrap();
        assert_eq!(est.estimator, Estimator::Bootstrap);
        assert!(est.p < 1.0);
        assert!(est.interval.is_some());
    }

    #[test]
    fn diversity_ranks() {
        let ranking: Vec<String> = (0..36).map(|k| format!("c{k:02}")).collect();
        let top6: Vec<(String, u64)> = ranking[..6].iter().map(|c| (c.clone(), 1)).collect();
        let refs: Vec<(&str, u64)> = top6.iter().map(|(c, o)| (c.as_str(), *o)).collect();
        let d = diversity(&configs(&refs), &ranking, 6).unwrap();
        assert_eq!((d.found, d.total), (6, 36));
        assert_eq!(d.mean_rank, Some(3.5));
        assert_eq!(d.histogram, vec![6, 0, 0, 0, 0, 0]);

        let empty = diversity(&SampleSet::new("x"), &ranking, 6).unwrap();
        assert_eq!((empty.found, empty.coverage, empty.mean_rank), (0, 0.0, None));

        assert!(diversity(&configs(&[("zz", 1)]), &ranking, 6).is_err());
    }

    #[test]
    fn front_examples() {
        let pts = vec![
            ParetoPoint::new("a", 1.0, 5.0),
            ParetoPoint::new("b", 2.0, 3.0),
            ParetoPoint::new("c", 3.0, 4.0),
        ];
        let ids: Vec<String> = pareto_front(&pts).into_iter().map(|p| p.config_id).collect();
        assert_eq!(ids, vec!["a", "b"]);

        let same = vec![ParetoPoint::new("z", 1.0, 1.0), ParetoPoint::new("m", 1.0, 1.0)];
        let front = pareto_front(&same);
        assert_eq!(front.len(), 1);
        assert_eq!(front[0].config_id, "m");
    }

    #[test]
    fn csv_markers() {
        let row = TttRow {
            solver: "sa".into(),
            tau: 0.5,
            p_opt: 0.0,
            ttt_opt: f64::INFINITY,
            ttt_feas: None,
            p_feas: None,
            found: 30,
            total: 36,
        };
        assert_eq!(
            ttt_csv(&[row], 0.99),
            "solver,tau,ttopt99,ttfeas99,coverage\nsa,0.5,inf,-,30/36\n"
        );
    }
}
