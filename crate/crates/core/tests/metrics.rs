use std::collections::BTreeSet;

use pdqubo::metrics::{
    diversity, estimate_success, pareto_front, ttt, ttt_csv, Estimator, ParetoPoint, Target, TttRow,
};
use pdqubo::solvers::{Record, SampleSet};
use proptest::prelude::*;

fn points() -> impl Strategy<Value = Vec<ParetoPoint>> {
    proptest::collection::vec((0u8..40, -20i32..20, -20i32..20), 0..40).prop_map(|v| {
        v.into_iter()
            .map(|(id, d, c)| ParetoPoint::new(format!("c{id:02}"), d as f64 / 2.0, c as f64 / 2.0))
            .collect()
    })
}

proptest! {
    #[test]
    fn front_is_non_dominated_and_complete(pts in points()) {
        let front = pareto_front(&pts);
        for f in &front {
            prop_assert!(!pts.iter().any(|p| p.dominates(f)));
        }
        for p in &pts {
            let dominated = pts.iter().any(|q| q.dominates(p));
            let represented = front.iter().any(|f| {
                f.discrete_objective == p.discrete_objective && f.continuous_objective == p.continuous_objective
            });
            prop_assert_eq!(dominated, !represented);
        }
    }

    #[test]
    fn front_is_idempotent(pts in points()) {
        let front = pareto_front(&pts);
        prop_assert_eq!(pareto_front(&front), front);
    }

    #[test]
    fn front_ignores_input_order(pts in points(), rot in 0usize..40) {
        let mut shuffled = pts.clone();
        shuffled.reverse();
        if !shuffled.is_empty() {
            let k = rot % shuffled.len();
            shuffled.rotate_left(k);
        }
        prop_assert_eq!(pareto_front(&shuffled), pareto_front(&pts));
    }

    #[test]
    fn ttt_decreases_with_success_probability(tau in 0.001f64..10.0, p in 0.01f64..0.98, s in 0.5f64..0.999) {
        let a = ttt(tau, p, s).unwrap();
        let b = ttt(tau, (p + 0.01).min(1.0), s).unwrap();
        prop_assert!(b <= a);
    }
}

#[test]
fn ttt_reference_values() {
    assert_eq!(ttt(0.003, 1.0, 0.99).unwrap(), 0.003);
    assert!((ttt(1.0, 0.5, 0.99).unwrap() - 6.6439).abs() < 1e-3);
    assert!((ttt(0.34, 0.012, 0.99).unwrap() - 129.6).abs() < 0.1);
    assert_eq!(ttt(1.0, 0.0, 0.99).unwrap(), f64::INFINITY);
    assert!(ttt(1.0, 0.5, 1.0).is_err());
}

fn run(records: &[(&str, f64, Option<&str>, u64)]) -> SampleSet {
    let mut s = SampleSet::new("sa");
    s.tau_seconds = 0.5;
    for &(bits, e, config, n) in records {
        let mut r = Record::new(pdqubo::bits_from_str(bits).unwrap(), e);
        r.occurrences = n;
        r.feasible = config.is_some();
        r.objective = Some(e);
        r.config = config.map(String::from);
        s.records.push(r);
    }
    s.normalize();
    s
}

fn keys(ids: &[&str]) -> BTreeSet<String> {
    ids.iter().map(|s| s.to_string()).collect()
}

#[test]
fn optimal_target_counts_reads() {
    let s = run(&[
        ("00", 1.0, Some("a"), 3),
        ("01", 2.0, Some("b"), 1),
        ("11", 9.0, None, 6),
    ]);
    let opt = estimate_success(&s, &Target::Optimal(1.0), 0).unwrap();
    assert_eq!(opt.p, 0.3);
    assert_eq!(opt.estimator, Estimator::Count);

    let mut det = s.clone();
    det.deterministic = true;
    assert_eq!(estimate_success(&det, &Target::Optimal(1.0), 0).unwrap().p, 1.0);
    assert_eq!(estimate_success(&det, &Target::Optimal(0.5), 0).unwrap().p, 0.0);
}

#[test]
fn full_coverage_is_observed() {
    let s = run(&[
        ("00", 1.0, Some("a"), 3),
        ("01", 2.0, Some("b"), 1),
        ("11", 9.0, None, 6),
    ]);
    let est = estimate_success(&s, &Target::AllFeasible(keys(&["a", "b"])), 0).unwrap();
    assert_eq!((est.p, est.estimator, est.interval), (1.0, Estimator::Observed, None));
}

#[test]
fn partial_coverage_is_bootstrapped_with_interval() {
    let s = run(&[
        ("00", 1.0, Some("a"), 40),
        ("01", 2.0, Some("b"), 2),
        ("11", 5.0, None, 10),
    ]);
    let target = Target::AllFeasible(keys(&["a", "b", "c"]));
    let est = estimate_success(&s, &target, 9).unwrap();
    assert_eq!(est.estimator, Estimator::Bootstrap);
    assert!(est.p < 1.0);
    let (lo, hi) = est.interval.unwrap();
    assert!(lo <= est.p && est.p <= hi && hi < 0.01);
    assert_eq!(estimate_success(&s, &target, 9).unwrap(), est);
}

#[test]
fn diversity_ranks_and_histogram() {
    let s = run(&[
        ("00", 1.0, Some("a"), 5),
        ("10", 3.0, Some("c"), 2),
        ("11", 9.0, None, 3),
    ]);
    let ranking: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
    let d = diversity(&s, &ranking, 2).unwrap();
    assert_eq!((d.found, d.total), (2, 4));
    assert_eq!(d.ranks_found, vec![1, 3]);
    assert_eq!(d.histogram, vec![1, 1]);
    assert_eq!(d.reads_by_rank.get(&1), Some(&5));
    assert_eq!(d.mean_rank, Some(2.0));
}

#[test]
fn table_layout() {
    let rows = vec![
        TttRow {
            solver: "bb".into(),
            tau: 0.003,
            p_opt: 1.0,
            ttt_opt: 0.003,
            ttt_feas: None,
            p_feas: None,
            found: 1,
            total: 84,
        },
        TttRow {
            solver: "sa".into(),
            tau: 0.34,
            p_opt: 0.0,
            ttt_opt: f64::INFINITY,
            ttt_feas: Some(1.5),
            p_feas: None,
            found: 84,
            total: 84,
        },
    ];
    assert_eq!(
        ttt_csv(&rows, 0.99),
        "solver,tau,ttopt99,ttfeas99,coverage\nbb,0.003,0.003,-,1/84\nsa,0.34,inf,1.5,84/84\n"
    );
}
