use serde::{Serialize, Serializer};

use crate::sets::{Interval, NatSet};

/// A relation `B ⊆ X × Y` stored with both row and column views.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairBook {
    domain_x: NatSet,
    domain_y: NatSet,
    rows: Vec<Vec<u64>>,
    cols: Vec<Vec<u64>>,
    total: usize,
}

impl PairBook {
    pub fn new(domain_x: NatSet, domain_y: NatSet) -> Self {
        let rows = vec![Vec::new(); domain_x.universe().size() as usize];
        let cols = vec![Vec::new(); domain_y.universe().size() as usize];
        PairBook { domain_x, domain_y, rows, cols, total: 0 }
    }

    fn xu(&self) -> Interval {
        self.domain_x.universe()
    }

    fn yu(&self) -> Interval {
        self.domain_y.universe()
    }

    pub fn domain_x(&self) -> &NatSet {
        &self.domain_x
    }

    pub fn domain_y(&self) -> &NatSet {
        &self.domain_y
    }

    /// Records `(x, y)`; every pair is added at most once by the procedures.
    pub fn add(&mut self, x: u64, y: u64) {
        debug_assert!(self.domain_x.contains(x) && self.domain_y.contains(y));
        let (xl, yl) = (self.xu().lo(), self.yu().lo());
        self.rows[(x - xl) as usize].push(y);
        self.cols[(y - yl) as usize].push(x);
        self.total += 1;
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// `B(x, *)`.
    pub fn row(&self, x: u64) -> &[u64] {
        if !self.xu().contains(x) {
            return &[];
        }
        &self.rows[(x - self.xu().lo()) as usize]
    }

    /// `B(*, y)`.
    pub fn col(&self, y: u64) -> &[u64] {
        if !self.yu().contains(y) {
            return &[];
        }
        &self.cols[(y - self.yu().lo()) as usize]
    }

    pub fn row_len(&self, x: u64) -> usize {
        self.row(x).len()
    }

    pub fn col_len(&self, y: u64) -> usize {
        self.col(y).len()
    }

    pub fn max_row(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_col(&self) -> usize {
        self.cols.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `B(S, *)`: every `y` paired with some member of `S`.
    pub fn row_union(&self, s: &NatSet) -> NatSet {
        let mut out = NatSet::empty(self.yu());
        for x in s.iter() {
            for &y in self.row(x) {
                out.insert(y);
            }
        }
        out
    }

    /// Both views count the same pairs.
    pub fn is_consistent(&self) -> bool {
        let r: usize = self.rows.iter().map(Vec::len).sum();
        let c: usize = self.cols.iter().map(Vec::len).sum();
        r == self.total && c == self.total
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        let xl = self.xu().lo();
        self.rows
            .iter()
            .enumerate()
            .flat_map(move |(i, ys)| ys.iter().map(move |&y| (xl + i as u64, y)))
    }
}

impl Serialize for PairBook {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut pairs: Vec<(u64, u64)> = self.pairs().collect();
        pairs.sort_unstable();
        pairs.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn views_agree() {
        let x = NatSet::full(Interval::new(3, 10).unwrap());
        let y = NatSet::full(Interval::new(6, 20).unwrap());
        let mut b = PairBook::new(x, y);
        b.add(3, 7);
        b.add(3, 9);
        b.add(5, 9);
        assert_eq!(b.len(), 3);
        assert_eq!(b.row(3), &[7, 9]);
        assert_eq!(b.col(9), &[3, 5]);
        assert_eq!((b.max_row(), b.max_col()), (2, 2));
        assert!(b.is_consistent());
        let s = NatSet::from_members(Interval::new(3, 10).unwrap(), [5]).unwrap();
        assert_eq!(b.row_union(&s).to_vec(), vec![9]);
        assert!(b.row(100).is_empty());
    }
}
