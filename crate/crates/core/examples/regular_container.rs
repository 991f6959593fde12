//! The regular container, with the exhaustive and greedy first phase.

use missing_sums::container::{regular_container, Phase1Mode, RegularParams};
use missing_sums::instances::regular_guarantee_instance;

fn main() {
    let i = regular_guarantee_instance(1);
    for mode in [Phase1Mode::Exact, Phase1Mode::Greedy] {
        let params = RegularParams { kappa: &i.kappa, d: i.d, l: &i.l, mode, size_cap: 2_000_000 };
        let r = regular_container(&i.a, &i.x, &i.y, &params).unwrap();
        println!(
            "{mode:?}: case {:?}, |F0| {}, |Y0| {}, |F| {} (target {}), |Q| {}, guarantees apply {}",
            r.case,
            r.f0.len(),
            r.y0.len(),
            r.f.len(),
            r.target_size,
            r.q.len(),
            r.guarantees_applicable
        );
        if r.guarantees_applicable {
            println!("  guarantee met: {}", r.guarantee_met(&i.kappa, i.x.len()));
        }
    }
}
