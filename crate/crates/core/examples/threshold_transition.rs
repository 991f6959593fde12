//! Coupled samples across `p = c/m` show the switch from almost always to almost never missing `m` sums.

use missing_sums::montecarlo::{threshold_probe, DEFAULT_CONFIDENCE};

fn main() {
    let r = threshold_probe(400, &[0.1, 0.5, 1.0, 2.0, 4.0, 8.0], 2_000, 3, DEFAULT_CONFIDENCE).unwrap();
    println!("m = {}, n = {}", r.m, r.n);
    for row in &r.rows {
        println!("c {:>4}: p_hat {:.4} [{:.4}, {:.4}]", row.c, row.estimate.p_hat, row.estimate.ci_low, row.estimate.ci_high);
    }
    println!("monotone {}, coupling violations {}", r.monotone, r.coupling_violations);
}
