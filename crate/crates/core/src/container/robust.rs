//! The two-phase fingerprint procedure for β-sum-robust pairs.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::book::PairBook;
use crate::error::{Error, Result};
use crate::ratio::{self, int, Ratio};
use crate::sets::{slice, slice_count, sumset, NatSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RobustCase {
    /// `|B|` stayed below `β^{3/2}|X|^{3/2}/8`.
    SparseB,
    /// Dense `B` and `|B(F, *)| >= β|X|/32`; `Q` is empty.
    DenseBSumsetHeavy,
    /// Dense `B` and few distinct targets hit by `F`; `Q` from the trimmed book.
    DenseBContainerHeavy,
}

impl RobustCase {
    pub fn tag(&self) -> &'static str {
        match self {
            RobustCase::SparseB => "SparseB",
            RobustCase::DenseBSumsetHeavy => "DenseB_SumsetHeavy",
            RobustCase::DenseBContainerHeavy => "DenseB_ContainerHeavy",
        }
    }
}

/// The integer cut-offs every comparison of the procedure reduces to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RobustThresholds {
    /// `ceil(sqrt(|X|/β))` greedy steps per phase.
    pub steps: u64,
    /// Rows and columns freeze at `ceil(sqrt(β|X|))` pairs.
    pub freeze: u64,
    /// Case 1 iff `|B| < ceil(sqrt(β³|X|³/64))`.
    pub dense_book: u64,
    /// Case 1 container: `|S_x| >= ceil(β²|X|/8)`.
    pub slice_cut: u64,
    /// Case 2(a) iff `|B(F, *)| >= ceil(β|X|/32)`.
    pub sumset_heavy: u64,
    /// Case 2(b) container: `|B'(x, *)| >= ceil(sqrt(β³|X|/1024))`.
    pub trimmed_cut: u64,
}

impl RobustThresholds {
    pub fn new(size: usize, beta: &Ratio) -> Self {
        let x = int(size as u64);
        let b3 = beta * beta * beta;
        RobustThresholds {
            steps: ratio::ceil_sqrt(&(&x / beta)),
            freeze: ratio::ceil_sqrt(&(beta * &x)),
            dense_book: ratio::ceil_sqrt(&(&b3 * &x * &x * &x / int(64))),
            slice_cut: ratio::ceil_u64(&(beta * beta * &x / int(8))),
            sumset_heavy: ratio::ceil_u64(&(beta * &x / int(32))),
            trimmed_cut: ratio::ceil_sqrt(&(&b3 * &x / int(1024))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RobustContainerResult {
    pub f: NatSet,
    pub q: NatSet,
    pub case: RobustCase,
    pub f0: NatSet,
    pub f1: NatSet,
    pub r_x: NatSet,
    pub r_y: NatSet,
    pub book: PairBook,
    /// Chosen elements in order, first phase then second.
    pub trace: Vec<u64>,
    pub thresholds: RobustThresholds,
    /// `|(F + F) ∩ Y|`.
    pub sumset_hits: usize,
    /// `|X| > 16 β⁻³`.
    pub size_condition: bool,
    /// `|A| >= 2 sqrt(|X|/β)`.
    pub supply_condition: bool,
}

impl RobustContainerResult {
    /// `|(F + F) ∩ Y| + |Q| >= β|X|/64`.
    pub fn guarantee_met(&self, beta: &Ratio) -> bool {
        let x = self.book.domain_x().len() as u64;
        int(64 * (self.sumset_hits + self.q.len()) as u64) >= beta * int(x)
    }

    /// `|B(x, *)|, |B(*, y)| <= 2 sqrt(β|X|)`.
    pub fn frozen_caps_hold(&self, beta: &Ratio) -> bool {
        let x = self.book.domain_x().len() as u64;
        let cap = int(4) * beta * int(x);
        let r = self.book.max_row() as u64;
        let c = self.book.max_col() as u64;
        int(r * r) <= cap && int(c * c) <= cap
    }
}

fn pick_max<I: Iterator<Item = u64>, F: FnMut(u64) -> usize>(candidates: I, mut score: F) -> Option<u64> {
    // ascending scan, replace only on a strictly larger score: the smallest maximiser wins
    let mut best: Option<(u64, usize)> = None;
    for a in candidates {
        let s = score(a);
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((a, s));
        }
    }
    best.map(|(a, _)| a)
}

/// Runs the procedure on `A ⊆ X` against targets `Y`.
pub fn robust_pair_container(a: &NatSet, x: &NatSet, y: &NatSet, beta: &Ratio) -> Result<RobustContainerResult> {
    if !beta.is_positive() {
        return Err(Error::PreconditionViolated("beta must be positive".into()));
    }
    if !a.is_subset(x) {
        return Err(Error::PreconditionViolated("A must be a subset of X".into()));
    }
    let nx = x.len();
    let th = RobustThresholds::new(nx, beta);
    let size_condition = beta * beta * beta * int(nx as u64) > int(16);
    let supply_condition = int((a.len() * a.len()) as u64) * beta >= int(4 * nx as u64);

    let supply = |needed: u64| Error::InsufficientFingerprintSupply { needed: needed as usize, available: a.len() };
    let mut f = NatSet::empty(a.universe());
    let mut free_x = x.clone();
    let mut free_y = y.clone();
    let mut book = PairBook::new(x.clone(), y.clone());
    let mut trace = Vec::new();

    for _ in 0..th.steps {
        let avail = a.difference(&f);
        let pick = pick_max(avail.iter(), |c| slice_count(c, &free_x, &free_y)).ok_or_else(|| supply(th.steps))?;
        let hit = slice(pick, &free_x, &free_y);
        f.insert(pick);
        trace.push(pick);
        for v in hit.iter() {
            book.add(v, pick + v);
        }
        for v in hit.iter() {
            if book.row_len(v) as u64 >= th.freeze {
                free_x.remove(v);
            }
            if book.col_len(pick + v) as u64 >= th.freeze {
                free_y.remove(pick + v);
            }
        }
    }
    let r_x = x.difference(&free_x);
    let r_y = y.difference(&free_y);
    let f0 = f.clone();
    let mut f1 = NatSet::empty(a.universe());

    let (case, q) = if (book.len() as u64) < th.dense_book {
        let mut q = NatSet::empty(x.universe());
        for v in x.difference(&f).iter() {
            if slice_count(v, &free_x, &free_y) as u64 >= th.slice_cut {
                q.insert(v);
            }
        }
        (RobustCase::SparseB, q)
    } else {
        let mut hit_targets = book.row_union(&f);
        for _ in 0..th.steps {
            let avail = a.difference(&f);
            let pick = pick_max(avail.iter(), |c| book.row(c).iter().filter(|&&t| !hit_targets.contains(t)).count())
                .ok_or_else(|| supply(2 * th.steps))?;
            f.insert(pick);
            f1.insert(pick);
            trace.push(pick);
            for &t in book.row(pick) {
                hit_targets.insert(t);
            }
        }
        if hit_targets.len() as u64 >= th.sumset_heavy {
            (RobustCase::DenseBSumsetHeavy, NatSet::empty(x.universe()))
        } else {
            let mut q = NatSet::empty(x.universe());
            for v in x.iter() {
                let trimmed = book.row(v).iter().filter(|&&t| !hit_targets.contains(t)).count();
                if trimmed as u64 >= th.trimmed_cut {
                    q.insert(v);
                }
            }
            (RobustCase::DenseBContainerHeavy, q)
        }
    };

    let sumset_hits = sumset(&f).intersection_len(y);
    Ok(RobustContainerResult {
        f,
        q,
        case,
        f0,
        f1,
        r_x,
        r_y,
        book,
        trace,
        thresholds: th,
        sumset_hits,
        size_condition,
        supply_condition,
    })
}
