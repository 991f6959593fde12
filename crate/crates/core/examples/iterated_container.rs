//! The iterated container for missing many sums from an interval.

use missing_sums::container::iterated_container;
use missing_sums::instances::iterated_instance;
use missing_sums::ratio::display;

fn main() {
    for seed in 0..4 {
        let i = iterated_instance(seed);
        match iterated_container(&i.a, i.x, i.d, &i.eps, &i.l) {
            Ok(r) => {
                println!(
                    "seed {seed}: |X| {} d {} eps {} -> {} rounds, |F| {} (padded from {}), |Q| {}",
                    i.x.size(),
                    i.d,
                    display(&i.eps),
                    r.iterations,
                    r.f.len(),
                    r.unpadded_size,
                    r.q.len()
                );
                for s in &r.states {
                    println!("  round {}: case {:?}, |Z| + |Q| = {}, gain {}", s.i, s.case, s.z.len() + s.q.len(), s.gain);
                }
            }
            Err(e) => println!("seed {seed}: {e}"),
        }
    }
}
