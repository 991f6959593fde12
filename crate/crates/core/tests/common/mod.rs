//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the library's arithmetic beyond constructing sets.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn sumset(members: &[u64]) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for &a in members {
        for &b in members {
            out.insert(a + b);
        }
    }
    out
}

/// Pairs `x <= x'` of `xs` with `x + x' ∈ ys`.
pub fn pair_count(xs: &[u64], ys: &BTreeSet<u64>) -> u64 {
    let mut c = 0;
    for (i, &a) in xs.iter().enumerate() {
        for &b in &xs[i..] {
            if ys.contains(&(a + b)) {
                c += 1;
            }
        }
    }
    c
}

pub fn representations(xs: &[u64], y: u64) -> u64 {
    let set: BTreeSet<u64> = [y].into();
    pair_count(xs, &set)
}

fn subsets_up_to(items: &[u64], k: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![(Vec::new(), 0usize)];
    for _ in 0..k {
        let mut next = Vec::new();
        for (s, start) in &frontier {
            for i in *start..items.len() {
                let mut t: Vec<u64> = s.clone();
                t.push(items[i]);
                out.push(t.clone());
                next.push((t, i + 1));
            }
        }
        frontier = next;
    }
    out
}

/// β-sum-robustness by trying every `R_X, R_Y` of size at most `floor(β|X|)`.
pub fn robust_naive(xs: &[u64], ys: &BTreeSet<u64>, beta: &BigRational) -> bool {
    let nx = BigRational::from_integer(BigInt::from(xs.len()));
    let budget = (beta * &nx).floor().to_integer();
    let budget: usize = budget.try_into().unwrap_or(0);
    let need = beta * beta * &nx * &nx;
    let yv: Vec<u64> = ys.iter().copied().collect();
    for rx in subsets_up_to(xs, budget.min(xs.len())) {
        let left: Vec<u64> = xs.iter().copied().filter(|v| !rx.contains(v)).collect();
        for ry in subsets_up_to(&yv, budget.min(yv.len())) {
            let yl: BTreeSet<u64> = ys.iter().copied().filter(|v| !ry.contains(v)).collect();
            if BigRational::from_integer(BigInt::from(pair_count(&left, &yl))) < need {
                return false;
            }
        }
    }
    true
}

/// Outcomes of `A ∩ [1, min(n, x-1)]` missing `x` from `A + A`, counted by
/// size: all `2^k` of them are visited.
pub fn missing_outcomes_by_size(x: u64, n: u64) -> Vec<u64> {
    let k = n.min(x - 1);
    let mut by_size = vec![0u64; k as usize + 1];
    for mask in 0u64..(1u64 << k) {
        let has = |v: u64| v >= 1 && v <= k && mask >> (v - 1) & 1 == 1;
        let hit = (1..=k).any(|a| x > a && has(a) && has(x - a));
        if !hit {
            by_size[mask.count_ones() as usize] += 1;
        }
    }
    by_size
}

pub fn probability_from_outcomes(by_size: &[u64], p: &BigRational) -> BigRational {
    let k = by_size.len() - 1;
    let q = BigRational::one() - p;
    let mut total = BigRational::zero();
    for (c, &cnt) in by_size.iter().enumerate() {
        let term = num_traits::pow::pow(p.clone(), c) * num_traits::pow::pow(q.clone(), k - c);
        total += term * BigRational::from_integer(BigInt::from(cnt));
    }
    total
}

/// Tail frequency of `|[2n] \ (A+A)| >= m` from a generator unrelated to the
/// library's counter-based streams.
pub fn tail_frequency(n: u64, m: u64, p: f64, trials: u64, seed: u64) -> u64 {
    let mut r = StdRng::seed_from_u64(seed);
    let mut hits = 0;
    for _ in 0..trials {
        let a: Vec<u64> = (1..=n).filter(|_| r.gen_bool(p)).collect();
        let s = sumset(&a);
        let covered = s.iter().filter(|&&v| v <= 2 * n).count() as u64;
        if 2 * n - covered >= m {
            hits += 1;
        }
    }
    hits
}

/// Pooled two-proportion test: the frequencies differ by at most five standard errors.
pub fn compatible(k1: u64, n1: u64, k2: u64, n2: u64) -> bool {
    let (p1, p2) = (k1 as f64 / n1 as f64, k2 as f64 / n2 as f64);
    let pool = (k1 + k2) as f64 / (n1 + n2) as f64;
    let se = (pool * (1.0 - pool) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    (p1 - p2).abs() <= 5.0 * se + 1e-12
}
