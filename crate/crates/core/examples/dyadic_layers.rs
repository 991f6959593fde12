//! Dyadic split of the end windows into layers with their regularity.

use missing_sums::ratio::{display, frac, Prob};
use missing_sums::regularity::{dyadic_partition, dyadic_target, regular_verify};

fn main() {
    let p: Prob = "1/10".parse().unwrap();
    let (n, m, d) = (2_000, 20, 20);
    let target = dyadic_target(n, m, &p).unwrap();
    println!("target: {} sums", target.len());
    for l in dyadic_partition(n, m, &p, d).unwrap() {
        let reg = regular_verify(&l.x, &l.y, &frac(1, 4));
        println!(
            "layer {:>2}: |X_j| {:>5} |Y_j| {:>5} d_j {:>3} min ratio {}",
            l.j,
            l.x.len(),
            l.y.len(),
            l.d_j,
            reg.min_ratio.as_ref().map(display).unwrap_or_else(|| "-".into())
        );
    }
}
