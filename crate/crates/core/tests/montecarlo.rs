mod common;

use missing_sums::audit::AuditConfig;
use missing_sums::montecarlo::{
    clopper_pearson, deficiency, deficiency_histogram, estimate_tail, lower_bound_check, middle_coverage, run_grid,
    single_element_exact, single_element_tail, threshold_probe, with_workers, ExperimentGrid, DEFAULT_CONFIDENCE,
};
use missing_sums::ratio::{frac, Prob};
use missing_sums::sets::{sample_trial, Interval, RandomSpec};

fn prob(t: &str) -> Prob {
    t.parse().unwrap()
}

#[test]
fn tail_at_full_and_empty_sets() {
    let one = estimate_tail(10, 1, &prob("1"), 50, 1, DEFAULT_CONFIDENCE).unwrap();
    assert_eq!(one.estimate.p_hat, 1.0);
    let zero = estimate_tail(10, 20, &prob("0"), 50, 1, DEFAULT_CONFIDENCE).unwrap();
    assert_eq!(zero.estimate.p_hat, 1.0);
    assert_eq!(zero.implication_failures, 0);
    let two = estimate_tail(10, 2, &prob("1"), 50, 1, DEFAULT_CONFIDENCE).unwrap();
    assert_eq!(two.estimate.p_hat, 0.0);
}

#[test]
fn tail_agrees_with_an_independent_generator() {
    let (n, m, p, trials) = (400, 100, 0.1, 20_000);
    let ours = estimate_tail(n, m, &Prob::from_f64(p).unwrap(), trials, 5, DEFAULT_CONFIDENCE).unwrap();
    let theirs = common::tail_frequency(n, m, p, trials, 77);
    assert!(
        common::compatible(ours.estimate.events, trials, theirs, trials),
        "{} vs {theirs} of {trials}",
        ours.estimate.events
    );
    assert_eq!(ours.implication_failures, 0);
    assert!(ours.in_range);
}

#[test]
fn lower_bound_exact_values() {
    let r = lower_bound_check(50, 10, &prob("0"), 100, 1, DEFAULT_CONFIDENCE).unwrap();
    assert_eq!(r.exact, frac(1, 1));
    assert_eq!(r.empirical.p_hat, 1.0);
    let r = lower_bound_check(50, 2, &prob("1/2"), 4000, 1, DEFAULT_CONFIDENCE).unwrap();
    assert_eq!(r.exact, frac(1, 2));
    assert!(r.empirical.contains(0.5));
    assert!(r.implies_tail);
    assert!(lower_bound_check(5, 20, &prob("1/2"), 10, 1, DEFAULT_CONFIDENCE).is_err());
}

#[test]
fn histogram_edges_and_mean() {
    let h = deficiency_histogram(30, &prob("1"), 20, 1).unwrap();
    assert_eq!(h.get(&1), Some(&20));
    let h = deficiency_histogram(30, &prob("0"), 20, 1).unwrap();
    assert_eq!(h.get(&60), Some(&20));

    let (n, p, trials) = (200u64, 0.2, 4000u64);
    let h = deficiency_histogram(n, &Prob::from_f64(p).unwrap(), trials, 3).unwrap();
    assert_eq!(h.values().sum::<u64>(), trials);
    let ours: Vec<f64> = h.iter().flat_map(|(&d, &c)| std::iter::repeat_n(d as f64, c as usize)).collect();
    let mut r = <rand::rngs::StdRng as rand::SeedableRng>::seed_from_u64(4);
    let theirs: Vec<f64> = (0..trials)
        .map(|_| {
            let a: Vec<u64> = (1..=n).filter(|_| rand::Rng::gen_bool(&mut r, p)).collect();
            (2 * n) as f64 - common::sumset(&a).len() as f64
        })
        .collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let var = |v: &[f64]| {
        let m = mean(v);
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
    };
    let se = ((var(&ours) + var(&theirs)) / trials as f64).sqrt();
    assert!((mean(&ours) - mean(&theirs)).abs() <= 3.0 * se + 1e-9, "{} vs {}", mean(&ours), mean(&theirs));
}

#[test]
fn deficiency_matches_naive() {
    let spec = RandomSpec::new(prob("1/3"), 8, Interval::first(90).unwrap());
    for t in 0..30 {
        let a = sample_trial(&spec, t);
        let s = common::sumset(&a.to_vec());
        assert_eq!(deficiency(&a), 180 - s.len() as u64);
    }
}

#[test]
fn threshold_low_c_always_misses() {
    let r = threshold_probe(100, &[0.1, 10.0], 300, 2, DEFAULT_CONFIDENCE).unwrap();
    assert_eq!(r.coupling_violations, 0);
    assert!(r.rows[0].estimate.p_hat >= 0.99);
    assert!(r.rows[1].estimate.p_hat <= r.rows[0].estimate.p_hat);
    assert!(r.rows[1].p.is_one());
    assert!(threshold_probe(100, &[20.0], 10, 2, DEFAULT_CONFIDENCE).is_err());
}

#[test]
fn middle_coverage_cases() {
    let v = middle_coverage(100, 50, &prob("1/4"), 100, 1, DEFAULT_CONFIDENCE).unwrap();
    assert!(v.vacuous && v.empirical.p_hat == 0.0);
    let full = middle_coverage(100, 10, &prob("1"), 100, 1, DEFAULT_CONFIDENCE).unwrap();
    assert!(!full.vacuous && full.empirical.p_hat == 0.0);
    let r = middle_coverage(5000, 50, &prob("2/5"), 2000, 1, DEFAULT_CONFIDENCE).unwrap();
    assert!(r.empirical.ci_low <= r.bound, "{} vs {}", r.empirical.p_hat, r.bound);
}

#[test]
fn single_element_small_values() {
    assert_eq!(single_element_exact(2, 5, &prob("1/2")), frac(1, 2));
    assert_eq!(single_element_exact(6, 5, &prob("1/3")), frac(128, 243));
    let by = common::missing_outcomes_by_size(6, 5);
    assert_eq!(common::probability_from_outcomes(&by, &frac(1, 3)), frac(128, 243));
    let r = single_element_tail(40, 100, &Prob::from_f64(0.3).unwrap(), 50_000, 1, DEFAULT_CONFIDENCE).unwrap();
    assert!(r.empirical.contains(r.exact_value));
    assert!(r.exact_value <= r.stated_bound);
    assert!(r.bound_applies);
    assert!(single_element_tail(1, 10, &prob("1/2"), 10, 1, DEFAULT_CONFIDENCE).is_err());
    assert!(single_element_tail(21, 10, &prob("1/2"), 10, 1, DEFAULT_CONFIDENCE).is_err());
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let p = prob("1/20");
    let one = with_workers(Some(1), || estimate_tail(300, 40, &p, 3000, 9, DEFAULT_CONFIDENCE).unwrap().estimate);
    let four = with_workers(Some(4), || estimate_tail(300, 40, &p, 3000, 9, DEFAULT_CONFIDENCE).unwrap().estimate);
    assert_eq!(one, four);
}

#[test]
fn clopper_pearson_edges() {
    assert_eq!(clopper_pearson(0, 0, 0.95), (0.0, 1.0));
    let (lo, hi) = clopper_pearson(0, 100, 0.95);
    assert_eq!(lo, 0.0);
    assert!((hi - (1.0 - 0.025f64.powf(0.01))).abs() < 1e-9);
    let (lo, hi) = clopper_pearson(100, 100, 0.95);
    assert_eq!(hi, 1.0);
    assert!((lo - 0.025f64.powf(0.01)).abs() < 1e-9);
}

#[test]
fn empty_grid_gives_no_rows() {
    let rows = run_grid(&ExperimentGrid::default(), &AuditConfig::default(), DEFAULT_CONFIDENCE).unwrap();
    assert!(rows.is_empty());
}

#[test]
fn grid_flags() {
    let grid = ExperimentGrid { n: vec![60], m: vec![10, 50], p: vec![prob("1/10")], eps: vec![0.25], trials: 500, seed: 1 };
    let rows = run_grid(&grid, &AuditConfig::default(), DEFAULT_CONFIDENCE).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| !r.hypotheses_hold() && !r.violated()));
    assert!(rows[1].flag.contains("out_of_range"));
}
