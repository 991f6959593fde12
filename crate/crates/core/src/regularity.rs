//! Checkers for Pollard's inequality, sum-robustness and sum-regularity,
//! plus the dyadic layering of the middle window.

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratio::{self, frac, int, Prob, Ratio};
use crate::sets::{pair_count, representation_counts, Interval, NatSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PollardReport {
    pub lhs: u64,
    #[serde(with = "ratio::serde_ratio")]
    pub rhs: Ratio,
    pub holds: bool,
}

/// Counts pairs `x <= x'` of `X` whose sum avoids `Y` and compares with `eps² |X|² / 2`.
///
/// Every sum of `X` lies in the doubled universe, so the complement of `Y`
/// is only ever needed inside that window.
pub fn pollard_verify(x: &NatSet, y: &NatSet, eps: &Ratio) -> Result<PollardReport> {
    if eps.is_negative() || *eps >= frac(1, 2) {
        return Err(Error::PreconditionViolated(format!(
            "eps = {} must lie in [0, 1/2)",
            ratio::display(eps)
        )));
    }
    let nx = x.len() as u64;
    let ny = y.len() as u64;
    if ny > 0 && int(nx) < (frac(1, 2) + eps) * int(ny) {
        return Err(Error::PreconditionViolated(format!(
            "|X| = {nx} < (1/2 + eps)|Y| with |Y| = {ny}"
        )));
    }
    let lhs = nx * (nx + 1) / 2 - pair_count(x, y);
    let rhs = eps * eps * int(nx * nx) / int(2);
    let holds = int(lhs) >= rhs;
    Ok(PollardReport { lhs, rhs, holds })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustReport {
    pub robust: bool,
    /// The first violating `(R_X, R_Y)`, with `R_X` in lexicographic order.
    pub witness: Option<(NatSet, NatSet)>,
    /// Fewest surviving pairs over all removals of maximal size.
    pub min_pairs: u64,
    /// `ceil(β² |X|²)`.
    pub required: u64,
    /// Removal sets `R_X` examined.
    pub candidates: u128,
}

pub const DEFAULT_ROBUST_CAP: u128 = 1_000_000;

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Removal budget `floor(β|X|)` and pair requirement `ceil(β²|X|²)`.
fn robust_sizes(x: &NatSet, beta: &Ratio) -> (u64, u64) {
    let nx = int(x.len() as u64);
    let budget = ratio::floor_u64(&(beta * &nx));
    let required = ratio::ceil_u64(&(beta * beta * &nx * &nx));
    (budget, required)
}

/// Representation counts of `Y` members inside `X`, paired with the member.
fn y_counts(x: &NatSet, y: &NatSet) -> Vec<(u64, u64)> {
    let lo2 = 2 * x.universe().lo();
    let reps = representation_counts(x);
    y.iter()
        .map(|v| {
            let c = if v >= lo2 { reps.get((v - lo2) as usize).copied().unwrap_or(0) } else { 0 };
            (v, c)
        })
        .collect()
}

/// The `r` members of `Y` with the most representations in `X`
/// (ties to the smaller member), and the pairs surviving their removal.
fn best_y_removal(x: &NatSet, y: &NatSet, r: usize) -> (NatSet, u64) {
    let mut counts = y_counts(x, y);
    let total: u64 = counts.iter().map(|c| c.1).sum();
    counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let chosen = &counts[..r.min(counts.len())];
    let removed: u64 = chosen.iter().map(|c| c.1).sum();
    let ry = NatSet::from_members(y.universe(), chosen.iter().map(|c| c.0)).expect("members of Y");
    (ry, total - removed)
}

/// Exhaustive test of β-sum-robustness.
///
/// Removing more elements never increases the pair count, so only removals
/// of exactly `min(floor(β|X|), |X|)` elements of `X` are enumerated; for each,
/// the worst removal from `Y` takes the members with the most representations.
pub fn robust_bruteforce(x: &NatSet, y: &NatSet, beta: &Ratio, cap: u128) -> Result<RobustReport> {
    if beta.is_negative() {
        return Err(Error::PreconditionViolated("beta must be nonnegative".into()));
    }
    let (budget, required) = robust_sizes(x, beta);
    let members = x.to_vec();
    let r = (budget as usize).min(members.len());
    let needed = binomial(members.len() as u64, r as u64);
    if needed > cap {
        return Err(Error::BudgetExceeded { needed, cap });
    }
    let full = pair_count(x, y);
    if full < required {
        let empty = (NatSet::empty(x.universe()), NatSet::empty(y.universe()));
        return Ok(RobustReport { robust: false, witness: Some(empty), min_pairs: full, required, candidates: 0 });
    }
    let ry_size = (budget as usize).min(y.len());
    let mut min_pairs = u64::MAX;
    let mut witness = None;
    let mut candidates = 0u128;
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        candidates += 1;
        let mut rest = x.clone();
        for &i in &idx {
            rest.remove(members[i]);
        }
        let (ry, left) = best_y_removal(&rest, y, ry_size);
        if left < min_pairs {
            min_pairs = left;
        }
        if left < required && witness.is_none() {
            let rx = NatSet::from_members(x.universe(), idx.iter().map(|&i| members[i])).expect("members of X");
            witness = Some((rx, ry));
            break;
        }
        if !next_combination(&mut idx, members.len()) {
            break;
        }
    }
    Ok(RobustReport { robust: witness.is_none(), witness, min_pairs, required, candidates })
}

/// Advances `idx` to the next `k`-combination of `0..n` in lexicographic order.
pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeuristicVerdict {
    Falsified,
    NotFalsified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeuristicReport {
    pub verdict: HeuristicVerdict,
    pub witness: Option<(NatSet, NatSet)>,
    pub pairs_left: u64,
    pub required: u64,
}

/// Adversarial removal: repeatedly drop the member of `X` lying in the most
/// pairs, then the most represented members of `Y`. A violation found this
/// way is a certificate of non-robustness; surviving it proves nothing.
pub fn robust_heuristic(x: &NatSet, y: &NatSet, beta: &Ratio) -> HeuristicReport {
    let (budget, required) = robust_sizes(x, beta);
    let mut rest = x.clone();
    let mut rx = NatSet::empty(x.universe());
    for _ in 0..(budget as usize).min(x.len()) {
        let mut best: Option<(u64, u64)> = None;
        for v in rest.iter() {
            let deg = crate::sets::slice_count(v, &rest, y) as u64;
            if best.is_none_or(|(_, b)| deg > b) {
                best = Some((v, deg));
            }
        }
        let Some((v, _)) = best else { break };
        rest.remove(v);
        rx.insert(v);
    }
    let (ry, left) = best_y_removal(&rest, y, (budget as usize).min(y.len()));
    if left < required {
        HeuristicReport { verdict: HeuristicVerdict::Falsified, witness: Some((rx, ry)), pairs_left: left, required }
    } else {
        HeuristicReport { verdict: HeuristicVerdict::NotFalsified, witness: None, pairs_left: left, required }
    }
}

/// `β = (α + ζ) / (12 T)` for an interval of size `T d` with `|Q| = d/2 − αd`
/// and `|Z| = 2|X| − d − ζd`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessCertificate {
    #[serde(with = "ratio::serde_ratio")]
    pub beta: Ratio,
    #[serde(with = "ratio::serde_ratio")]
    pub alpha: Ratio,
    #[serde(with = "ratio::serde_ratio")]
    pub zeta: Ratio,
    #[serde(with = "ratio::serde_ratio")]
    pub t: Ratio,
    pub d: u64,
}

pub fn robustness_certificate(t: &Ratio, d: u64, alpha: &Ratio, zeta: &Ratio) -> Result<RobustnessCertificate> {
    let fail = |why: String| Err(Error::PreconditionViolated(why));
    if d == 0 {
        return fail("d must be positive".into());
    }
    if *t < Ratio::one() {
        return fail(format!("T = {} must be at least 1", ratio::display(t)));
    }
    if !alpha.is_positive() || *alpha > frac(1, 2) {
        return fail(format!("alpha = {} must lie in (0, 1/2]", ratio::display(alpha)));
    }
    if zeta.is_negative() || *zeta > int(2) * t {
        return fail(format!("zeta = {} must lie in [0, 2T]", ratio::display(zeta)));
    }
    let beta = (alpha + zeta) / (int(12) * t);
    Ok(RobustnessCertificate { beta, alpha: alpha.clone(), zeta: zeta.clone(), t: t.clone(), d })
}

/// The certificate for `(X \ Q, (X+X) \ Z)` read off the actual cardinalities.
pub fn certificate_for(x: Interval, d: u64, q: &NatSet, z: &NatSet) -> Result<RobustnessCertificate> {
    if d == 0 {
        return Err(Error::PreconditionViolated("d must be positive".into()));
    }
    if q.iter().any(|v| !x.contains(v)) {
        return Err(Error::PreconditionViolated("Q must lie inside X".into()));
    }
    if z.iter().any(|v| !x.doubled().contains(v)) {
        return Err(Error::PreconditionViolated("Z must lie inside X + X".into()));
    }
    let dd = int(d);
    let t = int(x.size()) / &dd;
    let alpha = frac(1, 2) - int(q.len() as u64) / &dd;
    let zeta = (int(2 * x.size()) - &dd - int(z.len() as u64)) / &dd;
    robustness_certificate(&t, d, &alpha, &zeta)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularReport {
    pub holds: bool,
    pub min_count: Option<u64>,
    /// `None` when `Y` is empty (the minimum over nothing) or `X` is empty.
    #[serde(with = "opt_ratio")]
    pub min_ratio: Option<Ratio>,
    pub argmin: Option<u64>,
}

mod opt_ratio {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Ratio>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&ratio::display(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Ratio>, D::Error> {
        let v: Option<String> = Option::deserialize(d)?;
        v.map(|s| ratio::parse(&s)).transpose().map_err(serde::de::Error::custom)
    }
}

/// Whether every `y ∈ Y` has at least `κ|X|` representations `x + x'`, `x <= x'`.
pub fn regular_verify(x: &NatSet, y: &NatSet, kappa: &Ratio) -> RegularReport {
    let counts = y_counts(x, y);
    let Some(&(argmin, min_count)) = counts.iter().min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0))) else {
        return RegularReport { holds: true, min_count: None, min_ratio: None, argmin: None };
    };
    let nx = x.len() as u64;
    let holds = int(min_count) >= kappa * int(nx);
    let min_ratio = (nx > 0).then(|| frac(min_count as i64, nx as i64));
    RegularReport { holds, min_count: Some(min_count), min_ratio, argmin: Some(argmin) }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicLayer {
    pub j: u32,
    pub x: NatSet,
    pub y: NatSet,
    pub d_j: u64,
}

/// Integers of the real interval `[a, b]`, clipped to `[1, cap]`.
fn real_range(a: &Ratio, b: &Ratio, cap: u64) -> Option<(u64, u64)> {
    let lo = ratio::ceil_u64(a).max(1);
    let hi = ratio::floor_u64(b).min(cap);
    (!b.is_negative() && lo <= hi).then_some((lo, hi))
}

fn add_range(set: &mut NatSet, r: Option<(u64, u64)>) {
    if let Some((lo, hi)) = r {
        for v in lo..=hi {
            set.insert(v);
        }
    }
}

/// `max(ceil(d / 2^{j+2}), ceil(d / (2 log2 d)))`.
pub fn layer_budget(d: u64, j: u32) -> u64 {
    let dyadic = ratio::ceil_u64(&(int(d) / int(1u64 << (j + 2).min(63))));
    let logd = (d as f64).log2();
    let flat = (d as f64 / (2.0 * logd)).ceil() as u64;
    dyadic.max(flat)
}

/// The number of layers below the top one.
pub fn dyadic_top_index(n: u64, m: u64, p: &Prob) -> u32 {
    let two_over_p = int(2) / p.exact();
    let cap = ratio::floor_log2(&two_over_p);
    if int(2 * m) / p.exact() < int(n) {
        return (cap - 1) as u32;
    }
    // largest k < cap with 2^{k+1} M <= n; 0 if none
    let mut k: i64 = -1;
    let mut t = 0i64;
    while t < cap && (2u128 << t) * m as u128 <= n as u128 {
        k = t;
        t += 1;
    }
    k.max(0) as u32
}

/// Layers `(X_j, Y_j)` whose targets partition `[M, 2M/p] ∪ [2n − 2M/p, 2n − M]`.
pub fn dyadic_partition(n: u64, m: u64, p: &Prob, d: u64) -> Result<Vec<DyadicLayer>> {
    if m == 0 || m >= n {
        return Err(Error::PreconditionViolated(format!("need 1 <= M < n, got M = {m}, n = {n}")));
    }
    if p.is_zero() {
        return Err(Error::PreconditionViolated("p must be positive".into()));
    }
    if d < 4 {
        return Err(Error::PreconditionViolated(format!("d = {d} must be at least 4")));
    }
    let k = dyadic_top_index(n, m, p);
    let split = int(2 * m) / p.exact() < int(n);
    let xu = Interval::first(n)?;
    let yu = Interval::first(2 * n)?;
    let (nn, n2, mm) = (int(n), int(2 * n), int(m));
    let pow = |j: u32| int(1u64 << j) * &mm;
    let eps_below = |r: Ratio| r - frac(1, 2);
    let mut layers = Vec::with_capacity(k as usize + 1);
    for j in 0..k {
        let mut x = NatSet::empty(xu);
        let mut y = NatSet::empty(yu);
        add_range(&mut y, real_range(&pow(j), &eps_below(pow(j + 1)), 2 * n));
        add_range(&mut y, real_range(&(&n2 - pow(j + 1) + frac(1, 2)), &(&n2 - pow(j)), 2 * n));
        add_range(&mut x, real_range(&Ratio::one(), &pow(j + 1), n));
        add_range(&mut x, real_range(&(&nn - pow(j + 1)), &nn, n));
        layers.push(DyadicLayer { j, x, y, d_j: layer_budget(d, j) });
    }
    let mut x = NatSet::empty(xu);
    let mut y = NatSet::empty(yu);
    if split {
        let top = &mm * int(2) / p.exact();
        let half = &mm / p.exact();
        add_range(&mut y, real_range(&pow(k), &top, 2 * n));
        add_range(&mut y, real_range(&(&n2 - &top), &(&n2 - pow(k)), 2 * n));
        add_range(&mut x, real_range(&Ratio::one(), &half, n));
        add_range(&mut x, real_range(&(&nn - &half), &nn, n));
    } else {
        add_range(&mut y, real_range(&pow(k), &(&n2 - pow(k)), 2 * n));
        x = NatSet::full(xu);
    }
    layers.push(DyadicLayer { j: k, x, y, d_j: layer_budget(d, k) });
    Ok(layers)
}

/// The region `[M, 2M/p] ∪ [2n − 2M/p, 2n − M]`, inside `[M, 2n − M]`, that the layers must cover.
pub fn dyadic_target(n: u64, m: u64, p: &Prob) -> Result<NatSet> {
    if m == 0 || m >= n || p.is_zero() {
        return Err(Error::PreconditionViolated(format!("need 1 <= M < n and p > 0, got M = {m}, n = {n}")));
    }
    let yu = Interval::first(2 * n)?;
    let mut y = NatSet::empty(yu);
    let top = int(2 * m) / p.exact();
    let (lo, hi) = (int(m), int(2 * n - m));
    add_range(&mut y, real_range(&lo, &top.clone().min(hi.clone()), 2 * n));
    add_range(&mut y, real_range(&(int(2 * n) - &top).max(lo), &hi, 2 * n));
    Ok(y)
}

impl DyadicLayer {
    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: u64, hi: u64) -> NatSet {
        NatSet::full(Interval::new(lo, hi).unwrap())
    }

    #[test]
    fn pollard_reference_values() {
        let r = pollard_verify(&iv(1, 10), &iv(1, 10), &frac(2, 5)).unwrap();
        assert_eq!((r.lhs, r.rhs.clone(), r.holds), (30, int(8), true));
        let empty = NatSet::empty(Interval::first(20).unwrap());
        let r = pollard_verify(&iv(1, 10), &empty, &frac(2, 5)).unwrap();
        assert_eq!((r.lhs, r.holds), (55, true));
        assert!(pollard_verify(&iv(1, 10), &iv(1, 10), &frac(1, 2)).is_err());
        assert!(pollard_verify(&iv(1, 5), &iv(1, 10), &frac(1, 10)).is_err());
    }

    /// Every pair `(R_X, R_Y)` with `|R_X|, |R_Y| <= budget`, by brute force.
    fn naive_robust(x: &NatSet, y: &NatSet, beta: &Ratio) -> bool {
        let (budget, required) = robust_sizes(x, beta);
        let xs = x.to_vec();
        let ys = y.to_vec();
        let subsets = |v: &Vec<u64>| -> Vec<Vec<u64>> {
            (0u32..1 << v.len())
                .filter(|m| (m.count_ones() as u64) <= budget)
                .map(|m| v.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &e)| e).collect())
                .collect()
        };
        for rx in subsets(&xs) {
            for ry in subsets(&ys) {
                let xr: Vec<u64> = xs.iter().copied().filter(|e| !rx.contains(e)).collect();
                let yr: Vec<u64> = ys.iter().copied().filter(|e| !ry.contains(e)).collect();
                let mut c = 0;
                for (i, &a) in xr.iter().enumerate() {
                    for &b in &xr[i..] {
                        c += yr.contains(&(a + b)) as u64;
                    }
                }
                if c < required {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn robust_small_reference() {
        let x = iv(1, 8);
        let y = iv(6, 12);
        for beta in [frac(1, 8), frac(1, 4), frac(1, 16), frac(3, 8)] {
            let rep = robust_bruteforce(&x, &y, &beta, DEFAULT_ROBUST_CAP).unwrap();
            assert_eq!(rep.robust, naive_robust(&x, &y, &beta), "beta {beta}");
        }
        // β = 1/8: one removal on each side, 8 candidates
        let rep = robust_bruteforce(&x, &y, &frac(1, 8), DEFAULT_ROBUST_CAP).unwrap();
        assert_eq!(rep.candidates, 8);
        assert!(rep.robust);
    }

    #[test]
    fn robust_witness_is_violating() {
        let x = iv(1, 8);
        let y = iv(6, 12);
        let rep = robust_bruteforce(&x, &y, &frac(3, 8), DEFAULT_ROBUST_CAP).unwrap();
        assert!(!rep.robust);
        let (rx, ry) = rep.witness.unwrap();
        assert!(rx.len() <= 3 && ry.len() <= 3);
        assert!(pair_count(&x.difference(&rx), &y.difference(&ry)) < rep.required);
    }

    #[test]
    fn robust_trivial_paths() {
        // β|X| < 1: no removals at all
        let rep = robust_bruteforce(&iv(1, 8), &iv(6, 12), &frac(1, 10), 1).unwrap();
        assert_eq!(rep.robust, pair_count(&iv(1, 8), &iv(6, 12)) >= rep.required);
        let empty = NatSet::empty(Interval::first(24).unwrap());
        let rep = robust_bruteforce(&iv(1, 12), &empty, &frac(1, 12), DEFAULT_ROBUST_CAP).unwrap();
        assert!(!rep.robust);
        let (rx, ry) = rep.witness.unwrap();
        assert!(rx.is_empty() && ry.is_empty());
        assert!(matches!(
            robust_bruteforce(&iv(1, 40), &iv(1, 80), &frac(1, 4), 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn heuristic_never_claims_robust_falsely() {
        let x = iv(1, 8);
        let y = iv(6, 12);
        let h = robust_heuristic(&x, &y, &frac(3, 8));
        assert_eq!(h.verdict, HeuristicVerdict::Falsified);
        let (rx, ry) = h.witness.unwrap();
        assert!(pair_count(&x.difference(&rx), &y.difference(&ry)) < h.required);
    }

    #[test]
    fn certificate_formula() {
        let c = robustness_certificate(&int(1), 10, &frac(1, 2), &int(0)).unwrap();
        assert_eq!(c.beta, frac(1, 24));
        let c = robustness_certificate(&int(2), 10, &frac(1, 10), &frac(1, 5)).unwrap();
        assert_eq!(c.beta, frac(1, 80));
        assert!(robustness_certificate(&int(1), 10, &int(0), &int(0)).is_err());
        assert!(robustness_certificate(&int(1), 10, &frac(3, 5), &int(0)).is_err());
        assert!(robustness_certificate(&int(1), 10, &frac(1, 4), &int(3)).is_err());
        assert!(robustness_certificate(&frac(1, 2), 10, &frac(1, 4), &int(0)).is_err());
    }

    #[test]
    fn certificate_from_sets() {
        let x = Interval::first(12).unwrap();
        let q = NatSet::empty(x);
        let z = NatSet::empty(x.doubled());
        let c = certificate_for(x, 12, &q, &z).unwrap();
        // T = 1, alpha = 1/2, zeta = (24 - 12)/12 = 1
        assert_eq!((c.t.clone(), c.alpha.clone(), c.zeta.clone()), (int(1), frac(1, 2), int(1)));
        assert_eq!(c.beta, frac(1, 8));
    }

    #[test]
    fn regular_reference() {
        let y = NatSet::from_members(Interval::first(30).unwrap(), [11]).unwrap();
        let r = regular_verify(&iv(1, 10), &y, &frac(1, 2));
        assert!(r.holds);
        assert_eq!(r.min_ratio, Some(frac(1, 2)));
        assert_eq!(r.argmin, Some(11));
        let r = regular_verify(&iv(1, 10), &NatSet::empty(Interval::first(30).unwrap()), &int(1));
        assert!(r.holds && r.argmin.is_none());
        let y = NatSet::from_members(Interval::first(30).unwrap(), [3, 11]).unwrap();
        let r = regular_verify(&iv(1, 10), &y, &frac(1, 2));
        assert!(!r.holds);
        assert_eq!((r.min_count, r.argmin), (Some(1), Some(3)));
    }

    #[test]
    fn dyadic_reference_case() {
        let p: Prob = "1/4".parse().unwrap();
        let layers = dyadic_partition(1_000_000, 1000, &p, 100).unwrap();
        let k = layers.len() as u32 - 1;
        assert_eq!(k, 2);
        assert!((k as f64) < (100f64).log2());
        let target = dyadic_target(1_000_000, 1000, &p).unwrap();
        let mut union = NatSet::empty(target.universe());
        for l in &layers {
            assert!(l.y.is_disjoint(&union));
            union = union.union(&l.y);
        }
        assert_eq!(union, target);
        // d_0 = max(ceil(100/4), ceil(100/(2 log2 100))) = max(25, 8)
        assert_eq!(layers[0].d_j, 25);
        assert_eq!(layers[0].y.min(), Some(1000));
        assert_eq!(layers[2].y.max(), Some(2_000_000 - 4000));
    }

    #[test]
    fn dyadic_merged_middle() {
        let p: Prob = "1/4".parse().unwrap();
        let layers = dyadic_partition(500, 100, &p, 16).unwrap();
        assert_eq!(layers.len(), 2);
        let target = dyadic_target(500, 100, &p).unwrap();
        let mut union = NatSet::empty(target.universe());
        for l in &layers {
            assert!(l.y.is_disjoint(&union));
            union = union.union(&l.y);
        }
        assert_eq!(union, target);
        assert_eq!(layers.last().unwrap().x.len(), 500);
        assert!(dyadic_partition(100, 100, &p, 16).is_err());
        assert!(dyadic_partition(1000, 100, &p, 3).is_err());
    }

    #[test]
    fn dyadic_layers_fall_short_of_quarter_regularity() {
        // y = 2^j M has floor(y/2) representations against |X_j| = 2^{j+2} M + 1
        let p: Prob = "1/4".parse().unwrap();
        let layers = dyadic_partition(100_000, 100, &p, 64).unwrap();
        let first = &layers[0];
        let r = regular_verify(&first.x, &first.y, &frac(1, 4));
        assert!(!r.holds);
        assert_eq!(r.argmin, Some(100));
        assert_eq!(r.min_ratio, Some(frac(50, 401)));
    }

    #[test]
    fn combinations_in_order() {
        let mut idx = vec![0, 1];
        let mut seen = vec![idx.clone()];
        while next_combination(&mut idx, 4) {
            seen.push(idx.clone());
        }
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(binomial(12, 3), 220);
    }
}
