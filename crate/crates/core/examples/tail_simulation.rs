//! Monte Carlo tail of the deficiency next to the exact lower bound and the main upper bound.

use missing_sums::audit::{bound_main, AuditConfig};
use missing_sums::montecarlo::{estimate_tail, lower_bound_check, DEFAULT_CONFIDENCE};
use missing_sums::ratio::Prob;

fn main() {
    let cfg = AuditConfig::default();
    for (n, m, p, eps, trials) in [(300, 20, 0.3, 0.25, 20_000), (1000, 40, 0.2, 0.25, 20_000), (12_600, 8_400, 0.5, 0.499, 2_000)] {
        let prob = Prob::from_f64(p).unwrap();
        let t = estimate_tail(n, m, &prob, trials, 1, DEFAULT_CONFIDENCE).unwrap();
        let lb = lower_bound_check(n, m, &prob, trials, 2, DEFAULT_CONFIDENCE).unwrap();
        let ub = bound_main(m, p, eps, &cfg);
        println!(
            "n {n} m {m} p {p}: P(deficiency >= m) ~ {:.5} [{:.5}, {:.5}], (1-p)^ceil(m/2) = {:.3e}, bound {:.3e} (hypotheses {})",
            t.estimate.p_hat,
            t.estimate.ci_low,
            t.estimate.ci_high,
            lb.exact_value,
            ub.value(),
            ub.hypotheses_hold
        );
    }
}
