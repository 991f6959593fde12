//! Bound values, the container constant series and union terms in log space.

use missing_sums::audit::{
    bound_few, bound_main, decomposition_audit, elementary_inequalities, l_series, smallest_c_many, union_term_many,
    AuditConfig,
};

fn main() {
    let cfg = AuditConfig::default();
    let s = l_series();
    println!("L series: {} ({} terms), ceiling {}", s.closed_form, s.terms, s.ceiling);
    for c in elementary_inequalities(2_000, 16) {
        println!("{:<28} holds {} worst margin {:e}", c.id, c.holds, c.worst_margin);
    }
    for m in [1_000, 1_000_000, 1_000_000_000] {
        let r = bound_main(m, 0.1, 0.1, &cfg);
        println!("bound_main m {m}: {} hypotheses {}", r.log_value, r.hypotheses_hold);
    }
    println!("bound_few M 2^20 d 16: {}", bound_few(1 << 20, 16, 0.01, &cfg).log_value);
    let dec = decomposition_audit(u64::MAX / 2, 1_000_000_000, 0.1, 0.1, &cfg);
    println!("decomposition: chain holds {}, dominant {}", dec.chain_holds, dec.dominant);
    for d in [1e8, 1e12, 1e20] {
        let u = union_term_many(d, 1.5, 0.1, 0.5, cfg.l, &cfg, 200);
        let c = smallest_c_many(d, 1.5, 0.1, cfg.l, 200);
        println!("union term d {d:e}: {} at p = 1/2, monotone {:?}, least C {:?}", u.log_value, u.monotone_on_grid, c);
    }
}
