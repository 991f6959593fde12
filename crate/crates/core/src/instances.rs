//! Seeded random instance families for the container procedures.
//!
//! Each family maps a seed to one instance; not every instance satisfies the
//! procedure's input requirements, so callers skip the ones that error.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ratio::{self, frac, Prob, Ratio};
use crate::sets::{sample, sumset, Interval, NatSet, RandomSpec};

fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(salt);
    r
}

/// A random `A` between `F` and `A`: each element of `A \ F` kept with probability 1/2.
pub fn sub_superset(a: &NatSet, f: &NatSet, seed: u64) -> NatSet {
    let mut r = rng(seed, 0x5b);
    let mut out = f.clone();
    for v in a.difference(f).iter() {
        if r.gen_bool(0.5) {
            out.insert(v);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RobustInstance {
    pub a: NatSet,
    pub x: NatSet,
    pub y: NatSet,
    #[serde(with = "ratio::serde_ratio")]
    pub beta: Ratio,
}

/// Interval `X`, a window `Y` inside `X + X` (narrow in about a third of the
/// draws), a random `A` and `β|X| >= 1`.
pub fn robust_instance(seed: u64) -> RobustInstance {
    let mut r = rng(seed, 1);
    let lo = r.gen_range(1..=30);
    let nx = r.gen_range(20..=120u64);
    let xu = Interval::new(lo, lo + nx - 1).expect("interval");
    let x = NatSet::full(xu);
    let narrow = r.gen_bool(0.3);
    let betas = if narrow {
        vec![frac(1, 3), frac(1, 2)]
    } else {
        vec![frac(1, 8), frac(1, 6), frac(1, 4), frac(1, 3), frac(1, 2)]
    };
    let beta = loop {
        let b = betas[r.gen_range(0..betas.len())].clone();
        if &b * ratio::int(nx) >= ratio::int(1) {
            break b;
        }
    };
    let span = xu.doubled();
    let width = if narrow { r.gen_range(1..=(nx / 8).max(1)) } else { r.gen_range(1..=2 * nx - 1) };
    let ylo = r.gen_range(span.lo()..=span.hi() - width + 1);
    let y = NatSet::from_interval(span, Interval::new(ylo, ylo + width - 1).expect("interval")).expect("window");
    let p = r.gen_range(0.15..0.95);
    let a = sample(&RandomSpec::new(Prob::from_f64(p).expect("p"), r.gen(), xu));
    RobustInstance { a, x, y, beta }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IteratedInstance {
    pub a: NatSet,
    pub x: Interval,
    pub d: u64,
    #[serde(with = "ratio::serde_ratio")]
    pub eps: Ratio,
    #[serde(with = "ratio::serde_ratio")]
    pub l: Ratio,
}

/// `X = [1, n]`, `A` a dense random subset of `[n/4 + 1, n]`, `d = 2 floor(n/4)`.
///
/// Every sum of `A` is at least `2 floor(n/4) + 2`, so `d` sums of `X` are missed.
pub fn iterated_instance(seed: u64) -> IteratedInstance {
    let mut r = rng(seed, 2);
    let n = r.gen_range(480..=720u64);
    let cut = n / 4 + 1;
    let p = r.gen_range(0.93..=1.0);
    let full = sample(&RandomSpec::new(Prob::from_f64(p).expect("p"), r.gen(), Interval::new(cut, n).expect("interval")));
    let x = Interval::first(n).expect("interval");
    let a = full.with_universe(x).expect("inside X");
    IteratedInstance { a, x, d: 2 * (cut - 1), eps: frac(49, 100), l: frac(8, 1) }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegularInstance {
    pub a: NatSet,
    pub x: NatSet,
    pub y: NatSet,
    pub d: u64,
    #[serde(with = "ratio::serde_ratio")]
    pub kappa: Ratio,
    #[serde(with = "ratio::serde_ratio")]
    pub l: Ratio,
}

/// Small `A` packed near the bottom of `X = [1, n]` and a window `Y` above it,
/// with `L` chosen so the target sits a little above `2 sqrt|X|`. `None` if
/// the draw leaves fewer than two missed targets.
pub fn regular_instance(seed: u64) -> Option<RegularInstance> {
    let mut r = rng(seed, 3);
    let nx: u64 = r.gen_range(48..=150);
    let cut = r.gen_range((nx / 4).max(20)..=nx / 2);
    let xu = Interval::first(nx).expect("interval");
    let x = NatSet::full(xu);
    let root = (nx as f64).sqrt().ceil() as usize;
    let size = (3 * root + r.gen_range(0..=4)).min(cut as usize);
    let mut a = NatSet::empty(xu);
    while a.len() < size {
        a.insert(r.gen_range(1..=cut));
    }
    for _ in 0..r.gen_range(0..=3) {
        a.insert(r.gen_range(1..=nx));
    }
    let ylo = r.gen_range(cut..=2 * cut + 10);
    let yhi = (ylo + r.gen_range(20..=80)).min(2 * nx);
    let y = NatSet::from_members(Interval::first(2 * nx).expect("interval"), ylo..=yhi).expect("window");
    let missed = y.difference(&sumset(&a)).len() as u64;
    if missed < 2 {
        return None;
    }
    let d = r.gen_range(1..=(missed / 2).max(1).min(y.len() as u64 / 2));
    let kappa = [frac(1, 8), frac(1, 4), frac(1, 2)][r.gen_range(0..3)].clone();
    let want = r.gen_range(2.2..3.0) / (y.len() as f64 / d as f64).log2();
    let l = frac((want * 16.0).round().max(1.0) as i64, 16);
    Some(RegularInstance { a, x, y, d, kappa, l })
}

/// `X = [1, 400]`, `Y = [361, 441]`, which is `(9/20)`-sum-regular, `d = 40`,
/// `L = 3`, and `A` a random subset of `[1, 159]` plus up to three elements
/// of `[181, 200]` whose sums reach `Y`.
pub fn regular_guarantee_instance(seed: u64) -> RegularInstance {
    let mut r = rng(seed, 4);
    let x = NatSet::full(Interval::first(400).expect("interval"));
    let y = NatSet::from_members(Interval::first(800).expect("interval"), 361..=441).expect("window");
    let p = r.gen_range(0.45..0.95);
    let low = sample(&RandomSpec::new(Prob::from_f64(p).expect("p"), r.gen(), Interval::first(159).expect("interval")));
    let mut a = low.with_universe(x.universe()).expect("inside X");
    for _ in 0..r.gen_range(0..=3) {
        a.insert(r.gen_range(181..=200));
    }
    RegularInstance { a, x, y, d: 40, kappa: frac(9, 20), l: frac(3, 1) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_reproducible() {
        assert_eq!(robust_instance(7).a, robust_instance(7).a);
        assert_eq!(iterated_instance(7).a, iterated_instance(7).a);
        let g = regular_guarantee_instance(3);
        assert!(g.a.is_subset(&g.x));
        assert!(sumset(&g.a).intersection_len(&g.y) as u64 <= g.y.len() as u64 - g.d);
    }

    #[test]
    fn sub_superset_is_sandwiched() {
        let a = NatSet::full(Interval::first(50).unwrap());
        let f = NatSet::from_members(a.universe(), [3, 9, 27]).unwrap();
        let s = sub_superset(&a, &f, 1);
        assert!(f.is_subset(&s) && s.is_subset(&a));
        assert_ne!(s, sub_superset(&a, &f, 2));
    }
}
