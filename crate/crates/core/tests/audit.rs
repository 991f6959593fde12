use missing_sums::audit::{
    bound_few, bound_main, bound_many, decomposition_audit, elementary_inequalities, end_pair_bound, l_series,
    union_term_many, union_term_regular, AuditConfig, LogValue,
};
use proptest::prelude::*;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

#[test]
fn main_bound_values() {
    let cfg = AuditConfig::default();
    let half = bound_main(100, 0.3, 0.5, &cfg);
    assert_eq!(half.value(), 1.0);
    let r = bound_main(100, 0.1, 0.1, &cfg);
    assert!(close(r.value(), 0.9f64.powi(40), 1e-12), "{}", r.value());
    assert!(!r.hypotheses_hold);
    assert!(bound_main(1_000_000_000, 0.1, 0.1, &cfg).hypotheses_hold);
}

#[test]
fn many_and_few_values() {
    let cfg = AuditConfig::default();
    assert_eq!(bound_many(1000, 2.0, 0.25, 0.3, &cfg).value(), 1.0);
    let r = bound_many(1000, 2.0, 0.05, 0.3, &cfg);
    assert!(close(r.value(), 0.7f64.powi(400), 1e-12));
    assert!(!bound_many(1000, 1.2, 0.05, 0.3, &cfg).hypotheses_hold);

    let few = bound_few(2048, 1, 0.5, &cfg);
    assert!(close(few.value(), 0.5, 1e-12));
    assert!(bound_few(1 << 20, 16, 1e-9, &cfg).value() > 0.999);
}

#[test]
fn union_terms_vanish_for_large_l() {
    let cfg = AuditConfig::default();
    let small = union_term_many(1e12, 1.5, 0.1, 0.3, 1.0, &cfg, 50);
    let big = union_term_many(1e12, 1.5, 0.1, 0.3, 1e9, &cfg, 50);
    assert!(big.log_value < small.log_value);
    assert_eq!(big.log_value.value(), 0.0);
    let r = union_term_regular(1e8, 1e4, 10.0, 0.5, 0.3, 1.0, &cfg, 20);
    assert_eq!(r.grid.len(), 20);
    assert!(r.hypotheses_hold);
}

#[test]
fn union_term_with_empty_range() {
    let cfg = AuditConfig::default();
    let r = union_term_many(1e4, 1.5, 0.1, 0.3, 32756.0, &cfg, 50);
    assert!(r.p_lo > 0.5);
    assert_eq!(r.monotone_on_grid, None);
    assert!(r.grid.is_empty() && !r.hypotheses_hold);
}

#[test]
fn l_series_ceiling() {
    let s = l_series();
    assert_eq!(s.ceiling, 32756);
    assert!((s.direct - s.closed_form).abs() < 1e-6);
    assert!(s.tail_bound < 1e-9);
}

#[test]
fn inequalities_hold() {
    let checks = elementary_inequalities(2000, 50);
    assert!(!checks.is_empty());
    for c in &checks {
        assert!(c.holds, "{} fails at {:?} by {}", c.id, c.worst_at, c.worst_margin);
    }
}

#[test]
fn decomposition_cells() {
    let cfg = AuditConfig::default();
    let small = decomposition_audit(100, 20, 0.1, 0.1, &cfg);
    assert!(!small.report.hypotheses_hold);
    assert!(!small.split);
    let large = decomposition_audit(u64::MAX / 2, 1_000_000_000, 0.1, 0.1, &cfg);
    assert!(large.report.hypotheses_hold);
    assert!(large.chain_holds);
    assert!(large.split);
    assert_eq!(large.dominant, "end_pairs");
}

#[test]
fn scientific_text_round_trips() {
    for lv in [LogValue(0.0), LogValue(-1.5), LogValue(-1e6), LogValue(42.0)] {
        let back = LogValue::from_scientific(&lv.to_scientific()).unwrap();
        assert!((back.ln() - lv.ln()).abs() <= 1e-9 * lv.ln().abs().max(1.0), "{lv:?} -> {back:?}");
    }
    assert_eq!(LogValue::from_scientific("0"), Some(LogValue(f64::NEG_INFINITY)));
    assert_eq!(LogValue(f64::NEG_INFINITY).to_scientific(), "0");
    assert!(LogValue::from_scientific("-2e3").is_none());
    assert!(LogValue::from_scientific("abc").is_none());
}

proptest! {
    #[test]
    fn main_bound_sits_between_powers(m in 1u64..10_000, p in 0.0f64..0.5, eps in 0.0f64..0.5) {
        let r = bound_main(m, p, eps, &AuditConfig::default());
        let floor = (m as f64 / 2.0).ceil() * (1.0 - p).ln();
        prop_assert!(floor <= r.log_value.ln() + 1e-9);
        prop_assert!(r.log_value.ln() <= 1e-12);
    }

    #[test]
    fn end_pair_bound_is_symmetric(d1 in 0u64..5000, d2 in 0u64..5000, m in 1u64..5000, p in 0.0f64..0.5) {
        prop_assert_eq!(end_pair_bound(d1, d2, m, p, 0.1), end_pair_bound(d2, d1, m, p, 0.1));
    }

    #[test]
    fn log_add_matches_direct_sum(a in -50.0f64..5.0, b in -50.0f64..5.0) {
        let s = LogValue(a).add(LogValue(b)).value();
        prop_assert!(close(s, a.exp() + b.exp(), 1e-12));
    }
}
