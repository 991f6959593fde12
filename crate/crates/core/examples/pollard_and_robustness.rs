//! Pollard's pair count inequality and exhaustive robustness on small sets.

use missing_sums::ratio::{display, frac};
use missing_sums::regularity::{certificate_for, pollard_verify, robust_bruteforce, robust_heuristic};
use missing_sums::sets::{Interval, NatSet};

fn main() {
    let x = NatSet::full(Interval::first(12).unwrap());
    let y = NatSet::from_members(x.universe().doubled(), 8..=18).unwrap();
    let r = pollard_verify(&x, &y, &frac(1, 4)).unwrap();
    println!("pollard: lhs {} rhs {} holds {}", r.lhs, display(&r.rhs), r.holds);

    let beta = frac(1, 6);
    let exact = robust_bruteforce(&x, &y, &beta, 1_000_000).unwrap();
    println!("robust at beta {}: {} ({} removal pairs tried)", display(&beta), exact.robust, exact.candidates);
    let h = robust_heuristic(&x, &y, &beta);
    println!("adversarial search: {:?}, {} pairs left, {} required", h.verdict, h.pairs_left, h.required);

    let empty_x = NatSet::empty(x.universe());
    let empty_y = NatSet::empty(x.universe().doubled());
    let c = certificate_for(x.universe(), 12, &empty_x, &empty_y).unwrap();
    println!("certified beta for d = 12 and Y = X + X: {}", display(&c.beta));
}
