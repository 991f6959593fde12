use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{Interval, NatSet};

/// Bits of `set` for the 64 consecutive naturals starting at `start`.
pub(crate) fn window(set: &NatSet, start: i64) -> u64 {
    let offset = start - set.universe().lo() as i64;
    let words = set.words();
    let nbits = words.len() as i64 * 64;
    if offset <= -64 || offset >= nbits {
        return 0;
    }
    let get = |w: i64| -> u64 {
        if w < 0 || w >= words.len() as i64 {
            0
        } else {
            words[w as usize]
        }
    };
    let q = offset.div_euclid(64);
    let r = offset.rem_euclid(64) as u32;
    if r == 0 {
        get(q)
    } else {
        (get(q) >> r) | (get(q + 1) << (64 - r))
    }
}

/// `dst |= src << shift` on raw word vectors (bit `i` of `src` lands on bit `i + shift`).
pub(crate) fn or_shifted(dst: &mut [u64], src: &[u64], shift: u64) {
    let q = (shift / 64) as usize;
    let r = (shift % 64) as u32;
    for (i, &w) in src.iter().enumerate() {
        if w == 0 {
            continue;
        }
        let k = i + q;
        if k < dst.len() {
            dst[k] |= w << r;
        }
        if r != 0 && k + 1 < dst.len() {
            dst[k + 1] |= w >> (64 - r);
        }
    }
}

/// `A + A`, living in the doubled universe.
pub fn sumset(a: &NatSet) -> NatSet {
    let lo = a.universe().lo();
    let out_u = a.universe().doubled();
    let mut out = NatSet::empty(out_u);
    for x in a.iter() {
        or_shifted(out.words_mut(), a.words(), x - lo);
    }
    out
}

pub fn sumset_size(a: &NatSet) -> usize {
    sumset(a).len()
}

/// `Y \ (A + A)`.
pub fn missing(y: &NatSet, a: &NatSet) -> NatSet {
    y.difference(&sumset(a))
}

/// `|{x ∈ X : a + x ∈ Y}|`.
pub fn slice_count(a: u64, x: &NatSet, y: &NatSet) -> usize {
    let base = x.universe().lo() as i64 + a as i64;
    x.words()
        .iter()
        .enumerate()
        .filter(|(_, &w)| w != 0)
        .map(|(k, &w)| (w & window(y, base + 64 * k as i64)).count_ones() as usize)
        .sum()
}

/// `{x ∈ X : a + x ∈ Y}`, in the universe of `X`.
pub fn slice(a: u64, x: &NatSet, y: &NatSet) -> NatSet {
    let base = x.universe().lo() as i64 + a as i64;
    let words = x
        .words()
        .iter()
        .enumerate()
        .map(|(k, &w)| if w == 0 { 0 } else { w & window(y, base + 64 * k as i64) })
        .collect();
    NatSet::from_words(x.universe(), words)
}

/// `|{(x, x') ∈ X × X : x <= x', x + x' ∈ Y}|`.
pub fn pair_count(x: &NatSet, y: &NatSet) -> u64 {
    if x.is_empty() || y.is_empty() {
        return 0;
    }
    let lo = x.universe().lo() as i64;
    let mut total = 0u64;
    for a in x.iter() {
        // partners x' >= a, so start at the word holding a
        let first = ((a as i64 - lo) / 64) as usize;
        for (k, &w) in x.words().iter().enumerate().skip(first) {
            if w == 0 {
                continue;
            }
            let mut w = w;
            if k == first {
                w &= u64::MAX << ((a as i64 - lo) % 64);
            }
            let start = lo + 64 * k as i64 + a as i64;
            total += (w & window(y, start)).count_ones() as u64;
        }
    }
    total
}

const FFT_CUTOFF: usize = 3000;

/// Unordered representation counts `r(y) = |{x <= x' in X : x + x' = y}|`,
/// indexed by `y - 2 lo` over the doubled universe.
pub fn representation_counts(x: &NatSet) -> Vec<u64> {
    let u = x.universe();
    let len = (u.doubled().size()) as usize;
    let members = x.to_vec();
    let lo = u.lo();
    let mut counts = vec![0u64; len];
    if members.len() <= FFT_CUTOFF {
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i..] {
                counts[(a + b - 2 * lo) as usize] += 1;
            }
        }
        return counts;
    }
    let size = (u.size() as usize * 2).next_power_of_two();
    let mut buf = vec![Complex::new(0.0, 0.0); size];
    for &a in &members {
        buf[(a - lo) as usize].re = 1.0;
    }
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for c in buf.iter_mut() {
        *c = *c * *c;
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let scale = size as f64;
    for (j, slot) in counts.iter_mut().enumerate() {
        let ord = (buf[j].re / scale).round().max(0.0) as u64;
        let diag = (j % 2 == 0 && x.contains(lo + (j / 2) as u64)) as u64;
        *slot = (ord + diag) / 2;
    }
    counts
}

/// Whether `|window \ (A + A)| >= m`, stopping as soon as the answer is known.
///
/// Members are folded in a spread-out order so that the covered count grows
/// quickly; the exact sumset is only completed when the deficiency is large.
pub fn deficiency_at_least(a: &NatSet, window_: Interval, m: u64) -> bool {
    let total = window_.size();
    if m == 0 {
        return true;
    }
    if m > total {
        return false;
    }
    let need = total - m + 1;
    let dbl = a.universe().doubled();
    let inside = dbl.lo() >= window_.lo() && dbl.hi() <= window_.hi();
    if !inside {
        let s = sumset(a);
        let covered = s.iter().filter(|&v| window_.contains(v)).count() as u64;
        return covered < need;
    }
    let members = a.to_vec();
    let k = members.len();
    if (k as u64) * (k as u64 + 1) / 2 < need {
        return true;
    }
    let lo = a.universe().lo();
    let mut seen = NatSet::empty(a.universe());
    let mut sums = NatSet::empty(dbl);
    let stride = spread_stride(k);
    let mut idx = 0usize;
    for step in 0..k {
        let x = members[idx];
        seen.insert(x);
        or_shifted(sums.words_mut(), seen.words(), x - lo);
        idx = (idx + stride) % k;
        if step % 8 == 7 || step + 1 == k {
            let covered = sums.len() as u64;
            if covered >= need {
                return false;
            }
            let remaining = (k - step - 1) as u64;
            // each later element adds at most |seen| + remaining new sums
            let cap = remaining * (step as u64 + 2) + remaining * remaining;
            if covered + cap < need {
                return true;
            }
        }
    }
    (sums.len() as u64) < need
}

fn spread_stride(k: usize) -> usize {
    if k <= 2 {
        return 1;
    }
    let mut s = ((k as f64) * 0.618_033_988_75) as usize;
    s = s.max(1);
    while num_integer::gcd(s, k) != 1 {
        s += 1;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(lo: u64, hi: u64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn set(lo: u64, hi: u64, m: &[u64]) -> NatSet {
        NatSet::from_members(u(lo, hi), m.iter().copied()).unwrap()
    }

    #[test]
    fn sumset_small_cases() {
        assert!(sumset(&NatSet::empty(u(1, 10))).is_empty());
        assert_eq!(sumset(&set(1, 4, &[1, 2, 4])).to_vec(), vec![2, 3, 4, 5, 6, 8]);
        let interval = NatSet::full(u(1, 100));
        assert_eq!(sumset(&interval).to_vec(), (2..=200).collect::<Vec<_>>());
    }

    #[test]
    fn missing_small_cases() {
        let y = NatSet::full(u(2, 8));
        assert_eq!(missing(&y, &set(1, 4, &[1, 2, 4])).to_vec(), vec![7]);
        let y = NatSet::full(u(1, 10));
        assert_eq!(missing(&y, &NatSet::empty(u(1, 5))).len(), 10);
    }

    #[test]
    fn pair_counts() {
        assert_eq!(pair_count(&set(1, 3, &[1, 2, 3]), &set(1, 10, &[4])), 2);
        assert_eq!(pair_count(&NatSet::full(u(1, 10)), &NatSet::empty(u(1, 20))), 0);
        assert_eq!(pair_count(&NatSet::full(u(1, 10)), &NatSet::full(u(11, 20))), 30);
        // offsets not aligned to words
        let x = NatSet::full(u(37, 300));
        let y = NatSet::full(u(100, 400));
        let brute = (37..=300u64)
            .flat_map(|a| (a..=300).map(move |b| a + b))
            .filter(|s| (100..=400).contains(s))
            .count() as u64;
        assert_eq!(pair_count(&x, &y), brute);
    }

    #[test]
    fn slices() {
        assert_eq!(slice(2, &set(1, 3, &[1, 2, 3]), &set(1, 9, &[4, 5])).to_vec(), vec![2, 3]);
        assert!(slice(1, &NatSet::full(u(1, 9)), &NatSet::empty(u(1, 9))).is_empty());
        let s = slice(7, &NatSet::full(u(1, 20)), &NatSet::full(u(10, 15)));
        assert_eq!(s.to_vec(), (3..=8).collect::<Vec<_>>());
        assert_eq!(slice_count(7, &NatSet::full(u(1, 20)), &NatSet::full(u(10, 15))), 6);
    }

    #[test]
    fn representation_counts_match_between_methods() {
        let members: Vec<u64> = (1..=9000u64).filter(|x| x % 3 != 0 || x % 7 == 0).collect();
        let x = NatSet::from_members(u(1, 9000), members.iter().copied()).unwrap();
        let fast = representation_counts(&x);
        let small = NatSet::from_members(u(1, 9000), members.iter().copied().take(2000)).unwrap();
        let direct = representation_counts(&small);
        assert_eq!(fast.len(), direct.len());
        for y in [2u64, 3, 100, 9001, 12345, 17999, 18000] {
            let j = (y - 2) as usize;
            let naive = members.iter().filter(|&&a| 2 * a <= y && x.contains(y - a)).count() as u64;
            assert_eq!(fast[j], naive, "y = {y}");
        }
        let naive_small: u64 = direct.iter().sum();
        assert_eq!(naive_small, 2000 * 2001 / 2);
    }

    #[test]
    fn deficiency_threshold_agrees_with_full_count() {
        let w = u(1, 200);
        for seed_mod in 2..9u64 {
            let a = NatSet::from_members(u(1, 100), (1..=100).filter(|x| x % seed_mod == 1)).unwrap();
            let def = missing(&NatSet::full(w), &a).len() as u64;
            for m in [0, def.saturating_sub(1), def, def + 1, 200, 201] {
                assert_eq!(deficiency_at_least(&a, w, m), def >= m, "mod {seed_mod} m {m}");
            }
        }
    }
}
