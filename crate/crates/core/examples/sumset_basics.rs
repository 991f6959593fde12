//! Sumsets, missing sums and representation counts of a random subset of `[1, 40]`.

use missing_sums::sets::{missing, representation_counts, sample, sumset, Interval, NatSet, RandomSpec};

fn main() {
    let u = Interval::first(40).unwrap();
    let a = sample(&RandomSpec::new("1/4".parse().unwrap(), 7, u));
    let s = sumset(&a);
    let all = NatSet::full(u.doubled());
    let gaps = missing(&all, &a);
    println!("A      = {:?}", a.to_vec());
    println!("|A+A|  = {} of {}", s.len(), all.len());
    println!("missing: {:?}", gaps.to_vec());

    let counts = representation_counts(&a);
    let (y, r) = counts.iter().enumerate().max_by_key(|&(_, c)| c).unwrap();
    println!("most represented sum: {} ({} ordered pairs)", y as u64 + 2 * u.lo(), r);
}
