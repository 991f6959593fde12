//! The robust pair container on a sampled instance, replayed on a sub-superset.

use missing_sums::container::robust_pair_container;
use missing_sums::instances::{robust_instance, sub_superset};
use missing_sums::ratio::display;

fn main() {
    let (seed, i) = (0..).map(|s| (s, robust_instance(s))).find(|(_, i)| robust_pair_container(&i.a, &i.x, &i.y, &i.beta).is_ok()).unwrap();
    let r = robust_pair_container(&i.a, &i.x, &i.y, &i.beta).unwrap();
    println!("seed {seed}: |X| = {}, |Y| = {}, |A| = {}, beta = {}", i.x.len(), i.y.len(), i.a.len(), display(&i.beta));
    println!("case {:?}: |F| = {}, |Q| = {}, fingerprint {:?}", r.case, r.f.len(), r.q.len(), r.trace);
    println!("F inside A: {}, Q misses A: {}", r.f.is_subset(&i.a), r.q.is_disjoint(&i.a));

    let a2 = sub_superset(&i.a, &r.f, 1);
    let again = robust_pair_container(&a2, &i.x, &i.y, &i.beta).unwrap();
    println!("replay on |A'| = {}: same (F, Q) = {}", a2.len(), again.f == r.f && again.q == r.q);
}
