//! Integer intervals, bit-vector sets of naturals and sumset arithmetic.

mod codec;
mod ops;
mod sample;

pub use codec::{decode_compact, encode_compact, SetJson};
pub use ops::{
    deficiency_at_least, missing, pair_count, representation_counts, slice, slice_count, sumset,
    sumset_size,
};
pub use sample::{inclusion_threshold, sample, sample_coupled, sample_trial, RandomSpec};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The integer interval `[lo, hi]` with `1 <= lo <= hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    lo: u64,
    hi: u64,
}

impl Interval {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo < 1 || lo > hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// `[1, n]`.
    pub fn first(n: u64) -> Result<Self> {
        Interval::new(1, n)
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn size(&self) -> u64 {
        self.hi - self.lo + 1
    }

    pub fn contains(&self, x: u64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// The window `[2 lo, 2 hi]` holding every sum of two members.
    pub fn doubled(&self) -> Interval {
        Interval { lo: 2 * self.lo, hi: 2 * self.hi }
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<u64> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A finite set of naturals inside a fixed universe interval.
///
/// Bit `i` of the backing words stands for `universe.lo() + i`; bits past
/// the end of the universe are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NatSet {
    universe: Interval,
    words: Vec<u64>,
}

fn word_count(size: u64) -> usize {
    size.div_ceil(64) as usize
}

impl NatSet {
    pub fn empty(universe: Interval) -> Self {
        NatSet { universe, words: vec![0; word_count(universe.size())] }
    }

    pub fn full(universe: Interval) -> Self {
        let mut s = NatSet { universe, words: vec![u64::MAX; word_count(universe.size())] };
        s.clear_tail();
        s
    }

    /// Builds a set from members in any order; duplicates are merged.
    pub fn from_members<I: IntoIterator<Item = u64>>(universe: Interval, members: I) -> Result<Self> {
        let mut s = NatSet::empty(universe);
        for x in members {
            if !universe.contains(x) {
                return Err(Error::OutOfUniverse { value: x, lo: universe.lo, hi: universe.hi });
            }
            s.insert(x);
        }
        Ok(s)
    }

    /// Builds a set from a strictly increasing sequence, rejecting anything else.
    pub fn from_sorted(universe: Interval, members: &[u64]) -> Result<Self> {
        for w in members.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::NotCanonical { prev: w[0], next: w[1] });
            }
        }
        NatSet::from_members(universe, members.iter().copied())
    }

    pub fn from_interval(universe: Interval, part: Interval) -> Result<Self> {
        NatSet::from_members(universe, part.iter())
    }

    pub(crate) fn from_words(universe: Interval, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), word_count(universe.size()));
        let mut s = NatSet { universe, words };
        s.clear_tail();
        s
    }

    fn clear_tail(&mut self) {
        let rem = self.universe.size() % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn universe(&self) -> Interval {
        self.universe
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn contains(&self, x: u64) -> bool {
        if !self.universe.contains(x) {
            return false;
        }
        let i = x - self.universe.lo;
        self.words[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    /// Inserts `x`; panics if `x` lies outside the universe.
    pub fn insert(&mut self, x: u64) {
        assert!(self.universe.contains(x), "{x} outside {}", self.universe);
        let i = x - self.universe.lo;
        self.words[(i / 64) as usize] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, x: u64) {
        if self.universe.contains(x) {
            let i = x - self.universe.lo;
            self.words[(i / 64) as usize] &= !(1 << (i % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter { set: self, word: 0, bits: self.words.first().copied().unwrap_or(0) }
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub fn min(&self) -> Option<u64> {
        self.iter().next()
    }

    pub fn max(&self) -> Option<u64> {
        let (i, w) = self.words.iter().enumerate().rev().find(|(_, &w)| w != 0)?;
        Some(self.universe.lo + i as u64 * 64 + 63 - w.leading_zeros() as u64)
    }

    /// Number of members in `[a, b]`.
    pub fn count_in(&self, a: u64, b: u64) -> usize {
        let a = a.max(self.universe.lo);
        let b = b.min(self.universe.hi);
        if a > b {
            return 0;
        }
        (a..=b).step_by(1).filter(|&x| self.contains(x)).count()
    }

    /// The same members re-homed into another universe.
    pub fn with_universe(&self, universe: Interval) -> Result<Self> {
        NatSet::from_members(universe, self.iter())
    }

    fn zip_same<F: Fn(u64, u64) -> u64>(&self, other: &NatSet, f: F) -> NatSet {
        let u = self.universe.hull(&other.universe);
        let a = self.with_universe(u).expect("hull contains members");
        let b = other.with_universe(u).expect("hull contains members");
        let words = a.words.iter().zip(&b.words).map(|(&x, &y)| f(x, y)).collect();
        NatSet::from_words(u, words)
    }

    fn aligned(&self, other: &NatSet) -> bool {
        self.universe == other.universe
    }

    /// Union; the result lives in the hull of both universes.
    pub fn union(&self, other: &NatSet) -> NatSet {
        if self.aligned(other) {
            let words = self.words.iter().zip(&other.words).map(|(x, y)| x | y).collect();
            return NatSet { universe: self.universe, words };
        }
        self.zip_same(other, |x, y| x | y)
    }

    /// Intersection, kept in the universe of `self`.
    pub fn intersection(&self, other: &NatSet) -> NatSet {
        if self.aligned(other) {
            let words = self.words.iter().zip(&other.words).map(|(x, y)| x & y).collect();
            return NatSet { universe: self.universe, words };
        }
        let mut out = NatSet::empty(self.universe);
        for x in self.iter().filter(|&x| other.contains(x)) {
            out.insert(x);
        }
        out
    }

    /// Difference, kept in the universe of `self`.
    pub fn difference(&self, other: &NatSet) -> NatSet {
        if self.aligned(other) {
            let words = self.words.iter().zip(&other.words).map(|(x, y)| x & !y).collect();
            return NatSet { universe: self.universe, words };
        }
        let mut out = self.clone();
        for x in other.iter() {
            out.remove(x);
        }
        out
    }

    pub fn is_subset(&self, other: &NatSet) -> bool {
        if self.aligned(other) {
            return self.words.iter().zip(&other.words).all(|(x, y)| x & !y == 0);
        }
        self.iter().all(|x| other.contains(x))
    }

    pub fn is_disjoint(&self, other: &NatSet) -> bool {
        if self.aligned(other) {
            return self.words.iter().zip(&other.words).all(|(x, y)| x & y == 0);
        }
        self.iter().all(|x| !other.contains(x))
    }

    /// Equal as sets of naturals, ignoring the universes.
    pub fn same_members(&self, other: &NatSet) -> bool {
        self.len() == other.len() && self.is_subset(other)
    }

    pub fn intersection_len(&self, other: &NatSet) -> usize {
        if self.aligned(other) {
            return self.words.iter().zip(&other.words).map(|(x, y)| (x & y).count_ones() as usize).sum();
        }
        self.iter().filter(|&x| other.contains(x)).count()
    }
}

impl fmt::Debug for NatSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NatSet{}{:?}", self.universe, self.to_vec())
    }
}

pub struct Iter<'a> {
    set: &'a NatSet,
    word: usize,
    bits: u64,
}

impl Iterator for Iter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if self.bits != 0 {
                let t = self.bits.trailing_zeros() as u64;
                self.bits &= self.bits - 1;
                return Some(self.set.universe.lo + self.word as u64 * 64 + t);
            }
            self.word += 1;
            self.bits = *self.set.words.get(self.word)?;
        }
    }
}

impl<'a> IntoIterator for &'a NatSet {
    type Item = u64;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(lo: u64, hi: u64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::new(0, 3).is_err());
        assert!(Interval::new(5, 4).is_err());
        assert_eq!(u(3, 10).size(), 8);
        assert_eq!(u(3, 10).doubled(), u(6, 20));
    }

    #[test]
    fn membership_and_iteration() {
        let s = NatSet::from_members(u(5, 200), [5, 64, 69, 130, 200]).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s.to_vec(), vec![5, 64, 69, 130, 200]);
        assert_eq!(s.min(), Some(5));
        assert_eq!(s.max(), Some(200));
        assert!(s.contains(69) && !s.contains(70) && !s.contains(4));
        assert!(NatSet::from_members(u(5, 10), [11]).is_err());
        assert!(NatSet::from_sorted(u(1, 10), &[3, 3]).is_err());
    }

    #[test]
    fn full_set_respects_tail() {
        let s = NatSet::full(u(1, 70));
        assert_eq!(s.len(), 70);
        assert_eq!(s.max(), Some(70));
    }

    #[test]
    fn set_algebra_across_universes() {
        let a = NatSet::from_members(u(1, 10), [1, 2, 3]).unwrap();
        let b = NatSet::from_members(u(3, 20), [3, 15]).unwrap();
        assert_eq!(a.union(&b).to_vec(), vec![1, 2, 3, 15]);
        assert_eq!(a.union(&b).universe(), u(1, 20));
        assert_eq!(a.intersection(&b).to_vec(), vec![3]);
        assert_eq!(a.difference(&b).to_vec(), vec![1, 2]);
        assert!(!a.is_disjoint(&b));
        assert!(a.intersection(&b).is_subset(&b));
        assert_eq!(a.count_in(2, 100), 2);
    }
}
