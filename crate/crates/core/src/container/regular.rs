//! The three-phase fingerprint procedure for κ-sum-regular pairs.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::book::PairBook;
use crate::error::{Error, Result};
use crate::ratio::{self, int, Ratio};
use crate::regularity::regular_verify;
use crate::sets::{slice, slice_count, sumset, NatSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase1Mode {
    /// Lexicographically first qualifying subset in (size, elements) order.
    Exact,
    /// Greedy growth of a candidate; carries no guarantee.
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegularCase {
    SparseB,
    DenseB,
}

impl RegularCase {
    pub fn tag(&self) -> &'static str {
        match self {
            RegularCase::SparseB => "SparseB",
            RegularCase::DenseB => "DenseB",
        }
    }
}

pub const DEFAULT_PHASE1_CAP: u128 = 2_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct Phase1Result {
    pub f0: NatSet,
    pub y0: NatSet,
    /// The subset taken in each round.
    pub rounds: Vec<Vec<u64>>,
    /// Candidate subsets examined.
    pub candidates: u128,
    pub mode: Phase1Mode,
}

/// Search state for one round: members of `A` and coverage counts over `Y_0`.
struct Cover<'a> {
    members: &'a [u64],
    y0: &'a NatSet,
    hits: Vec<u32>,
    covered: usize,
    chosen: Vec<usize>,
}

impl<'a> Cover<'a> {
    fn new(members: &'a [u64], y0: &'a NatSet) -> Self {
        let len = y0.universe().size() as usize;
        Cover { members, y0, hits: vec![0; len], covered: 0, chosen: Vec::new() }
    }

    fn touch(&mut self, s: u64, delta: i32) {
        if !self.y0.contains(s) {
            return;
        }
        let slot = &mut self.hits[(s - self.y0.universe().lo()) as usize];
        if delta > 0 {
            if *slot == 0 {
                self.covered += 1;
            }
            *slot += 1;
        } else {
            *slot -= 1;
            if *slot == 0 {
                self.covered -= 1;
            }
        }
    }

    fn push(&mut self, i: usize) {
        let v = self.members[i];
        for k in 0..self.chosen.len() {
            self.touch(v + self.members[self.chosen[k]], 1);
        }
        self.touch(2 * v, 1);
        self.chosen.push(i);
    }

    fn pop(&mut self) {
        let i = self.chosen.pop().expect("nonempty");
        let v = self.members[i];
        self.touch(2 * v, -1);
        for k in 0..self.chosen.len() {
            self.touch(v + self.members[self.chosen[k]], -1);
        }
    }

    /// Gain in coverage from adding member `i`.
    fn gain(&mut self, i: usize) -> usize {
        let before = self.covered;
        self.push(i);
        let g = self.covered - before;
        self.pop();
        g
    }
}

/// Depth-first search for the first size-`size` subset (lexicographic) covering
/// at least `need` members of `Y_0`. Subtrees that cannot reach `need` even if
/// every remaining element added fresh sums are skipped.
fn search_size(cover: &mut Cover<'_>, size: usize, need: usize, start: usize, count: &mut u128, cap: u128) -> Result<bool> {
    let depth = cover.chosen.len();
    if depth == size {
        *count += 1;
        if *count > cap {
            return Err(Error::BudgetExceeded { needed: *count, cap });
        }
        return Ok(cover.covered >= need);
    }
    let left = size - depth;
    let optimistic = cover.covered + left * depth + left * (left + 1) / 2;
    if optimistic < need {
        *count += 1;
        return Ok(false);
    }
    let n = cover.members.len();
    for i in start..=n - left {
        cover.push(i);
        if search_size(cover, size, need, i + 1, count, cap)? {
            return Ok(true);
        }
        cover.pop();
    }
    Ok(false)
}

fn exact_round(all: &[u64], y0: &NatSet, need: usize, max_subset: usize, count: &mut u128, cap: u128) -> Result<Option<Vec<u64>>> {
    // a member with no partner summing into Y_0 never belongs to a smallest
    // covering subset: dropping it keeps the coverage
    let members: Vec<u64> = all.iter().copied().filter(|&v| all.iter().any(|&w| y0.contains(v + w))).collect();
    let members = &members[..];
    let mut cover = Cover::new(members, y0);
    for size in 1..=max_subset.min(members.len()) {
        if search_size(&mut cover, size, need, 0, count, cap)? {
            return Ok(Some(cover.chosen.iter().map(|&i| members[i]).collect()));
        }
        debug_assert!(cover.chosen.is_empty());
    }
    Ok(None)
}

fn greedy_round(members: &[u64], y0: &NatSet, need: usize, max_subset: usize, count: &mut u128) -> Option<Vec<u64>> {
    let mut cover = Cover::new(members, y0);
    let n = members.len();
    if max_subset >= 2 && n >= 2 {
        let mut best: Option<((usize, usize), usize)> = None;
        for i in 0..n {
            cover.push(i);
            for j in i + 1..n {
                *count += 1;
                let g = cover.gain(j);
                if best.is_none_or(|(_, b)| g + cover.covered > b) {
                    best = Some(((i, j), g + cover.covered));
                }
            }
            cover.pop();
        }
        let ((i, j), _) = best?;
        cover.push(i);
        cover.push(j);
    }
    while cover.covered < need && cover.chosen.len() < max_subset.min(n) {
        let mut best: Option<(usize, usize)> = None;
        let open: Vec<usize> = (0..n).filter(|i| !cover.chosen.contains(i)).collect();
        for i in open {
            *count += 1;
            let g = cover.gain(i);
            if best.is_none_or(|(_, b)| g > b) {
                best = Some((i, g));
            }
        }
        let (i, _) = best?;
        cover.push(i);
    }
    if cover.covered < need {
        return None;
    }
    let mut out: Vec<u64> = cover.chosen.iter().map(|&i| members[i]).collect();
    out.sort_unstable();
    Some(out)
}

/// `ceil(κ|Y_0|/16)`.
fn strip_need(kappa: &Ratio, y0: usize) -> usize {
    ratio::ceil_u64(&(kappa * int(y0 as u64) / int(16))) as usize
}

/// Phase I: strip away targets covered by small subsets of `A`.
pub fn phase1_strip(a: &NatSet, y: &NatSet, kappa: &Ratio, mode: Phase1Mode, size_cap: u128, max_subset: usize) -> Result<Phase1Result> {
    if !kappa.is_positive() {
        return Err(Error::PreconditionViolated("kappa must be positive".into()));
    }
    let members = a.to_vec();
    let mut y0 = y.clone();
    let mut f0 = NatSet::empty(a.universe());
    let mut rounds = Vec::new();
    let mut candidates = 0u128;
    let all_sums = sumset(a);
    while !y0.is_empty() {
        let need = strip_need(kappa, y0.len());
        if all_sums.intersection_len(&y0) < need {
            break;
        }
        let found = match mode {
            Phase1Mode::Exact => exact_round(&members, &y0, need, max_subset, &mut candidates, size_cap)?,
            Phase1Mode::Greedy => greedy_round(&members, &y0, need, max_subset, &mut candidates),
        };
        let Some(fp) = found else { break };
        for &v in &fp {
            f0.insert(v);
        }
        y0 = y0.difference(&sumset(&f0));
        rounds.push(fp);
    }
    Ok(Phase1Result { f0, y0, rounds, candidates, mode })
}

/// Integer forms of the thresholds used after Phase I.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularThresholds {
    /// `ceil(sqrt(|X_0|))` steps per phase.
    pub steps: u64,
    /// Case 1 container: `|S_x| >= ceil(κ|Y_0|/4)`.
    pub slice_cut: u64,
    /// Phase III safety: `|B(F, *)| < ceil(κ|Y_0|/16)`.
    pub strip_cut: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularContainerResult {
    pub f: NatSet,
    pub f0: NatSet,
    pub q: NatSet,
    pub case: RegularCase,
    pub y0: NatSet,
    pub x0: NatSet,
    pub x_hat: NatSet,
    pub book: PairBook,
    pub phase1_mode: Phase1Mode,
    pub phase1_rounds: usize,
    /// Elements chosen in Phases II and III.
    pub trace: Vec<u64>,
    /// `F` before padding (Phases I–III).
    pub unpadded_size: usize,
    /// `ceil(L log2(|Y|/d) sqrt(|X|))`.
    pub target_size: u64,
    pub thresholds: RegularThresholds,
    /// `|B(F, *)|` after Phase III (0 in the sparse case).
    pub heavy_targets: usize,
    /// Greedy Phase I let a qualifying subset survive and Phase III exposed it.
    pub phase1_certificate_broken: bool,
    pub guarantees_applicable: bool,
}

impl RegularContainerResult {
    /// `|B(*, y)| <= ceil(sqrt(|X_0|))`, one pair per column and step.
    pub fn column_cap_holds(&self) -> bool {
        self.book.max_col() as u64 <= self.thresholds.steps
    }

    /// The same cap without rounding, `|B(*, y)|^2 <= |X_0|`.
    pub fn column_cap_unrounded(&self) -> bool {
        let c = self.book.max_col() as u64;
        c * c <= self.x0.len() as u64
    }

    /// `|B(x, *)| <= 2|Y_0| / sqrt(|X_0|)`.
    pub fn row_cap_holds(&self) -> bool {
        let r = self.book.max_row() as u128;
        let y0 = self.y0.len() as u128;
        r * r * self.x0.len() as u128 <= 4 * y0 * y0
    }

    /// `|Q| >= κ|X|/64`.
    pub fn guarantee_met(&self, kappa: &Ratio, x_size: usize) -> bool {
        int(64 * self.q.len() as u64) >= kappa * int(x_size as u64)
    }
}

/// `ceil(L log2(|Y|/d) sqrt(|X|))`.
pub fn regular_target(x_size: usize, y_size: usize, d: u64, l: &Ratio) -> u64 {
    let v = ratio::to_f64(l) * (y_size as f64 / d as f64).log2() * (x_size as f64).sqrt();
    v.ceil().max(0.0) as u64
}

pub struct RegularParams<'a> {
    pub kappa: &'a Ratio,
    pub d: u64,
    pub l: &'a Ratio,
    pub mode: Phase1Mode,
    pub size_cap: u128,
}

pub fn regular_container(a: &NatSet, x: &NatSet, y: &NatSet, params: &RegularParams<'_>) -> Result<RegularContainerResult> {
    let RegularParams { kappa, d, l, mode, size_cap } = *params;
    if !kappa.is_positive() || *kappa > Ratio::from_integer(1.into()) {
        return Err(Error::PreconditionViolated("kappa must lie in (0, 1]".into()));
    }
    if !a.is_subset(x) {
        return Err(Error::PreconditionViolated("A must be a subset of X".into()));
    }
    if d == 0 || (y.len() as u64) < 2 * d {
        return Err(Error::PreconditionViolated(format!("need 1 <= d <= |Y|/2 (|Y| = {}, d = {d})", y.len())));
    }
    let deficiency = y.difference(&sumset(a)).len() as u64;
    if deficiency < d {
        return Err(Error::PreconditionViolated(format!("|Y \\ (A+A)| = {deficiency} is below d = {d}")));
    }
    let target = regular_target(x.len(), y.len(), d, l);
    if (a.len() as u64) < target {
        return Err(Error::InsufficientFingerprintSupply { needed: target as usize, available: a.len() });
    }
    let max_subset = 2 * ratio::ceil_sqrt(&int(x.len() as u64)) as usize;
    let p1 = phase1_strip(a, y, kappa, mode, size_cap, max_subset)?;
    let f0 = p1.f0;
    let y0 = p1.y0;
    let x0 = x.difference(&f0);
    let nx0 = x0.len() as u64;
    let ny0 = y0.len() as u64;
    let th = RegularThresholds {
        steps: ratio::ceil_sqrt(&int(nx0)),
        slice_cut: ratio::ceil_u64(&(kappa * int(ny0) / int(4))),
        strip_cut: ratio::ceil_u64(&(kappa * int(ny0) / int(16))),
    };
    let frozen = |c: usize| (c as u128) * (c as u128) * nx0 as u128 >= (ny0 as u128) * (ny0 as u128);

    let supply = |needed: u64| Error::InsufficientFingerprintSupply { needed: needed as usize, available: a.len() };
    let mut f = NatSet::empty(a.universe());
    let mut free_x = x0.clone();
    let mut book = PairBook::new(x0.clone(), y0.clone());
    let mut trace = Vec::new();
    let pool = a.difference(&f0);
    for _ in 0..th.steps {
        let avail = pool.difference(&f);
        let mut best: Option<(u64, usize)> = None;
        for c in avail.iter() {
            let s = slice_count(c, &free_x, &y0);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((c, s));
            }
        }
        let (pick, _) = best.ok_or_else(|| supply(th.steps))?;
        let hit = slice(pick, &free_x, &y0);
        f.insert(pick);
        trace.push(pick);
        for v in hit.iter() {
            book.add(v, pick + v);
            if frozen(book.row_len(v)) {
                free_x.remove(v);
            }
        }
    }
    let x_hat = x0.difference(&free_x);
    let b = book.len() as u128;
    let k2 = kappa * kappa * int(nx0) * int(ny0 * ny0);
    let sparse = ratio::big(16 * b * b) < k2;

    let mut heavy_targets = 0;
    let mut broken = false;
    let (case, q) = if sparse {
        let mut q = NatSet::empty(x.universe());
        for v in x0.difference(&f).iter() {
            if slice_count(v, &free_x, &y0) as u64 >= th.slice_cut {
                q.insert(v);
            }
        }
        (RegularCase::SparseB, q)
    } else {
        let mut hit_targets = book.row_union(&f);
        for _ in 0..th.steps {
            let avail = pool.difference(&f);
            let mut best: Option<(u64, usize)> = None;
            for c in avail.iter() {
                let s = book.row(c).iter().filter(|&&t| !hit_targets.contains(t)).count();
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((c, s));
                }
            }
            let (pick, _) = best.ok_or_else(|| supply(2 * th.steps))?;
            f.insert(pick);
            trace.push(pick);
            for &t in book.row(pick) {
                hit_targets.insert(t);
            }
        }
        heavy_targets = hit_targets.len();
        let mut q = NatSet::empty(x.universe());
        if heavy_targets as u64 >= th.strip_cut {
            if mode == Phase1Mode::Exact {
                return Err(Error::InvariantViolated(format!(
                    "|B(F, *)| = {heavy_targets} reached κ|Y_0|/16 although Phase I was exhaustive"
                )));
            }
            broken = true;
        } else {
            let k2y = kappa * kappa * int(ny0 * ny0);
            for v in x0.iter() {
                let c = book.row(v).iter().filter(|&&t| !hit_targets.contains(t)).count() as u64;
                // c >= κ|Y_0| / (16 sqrt|X_0|)
                if c > 0 && int(256 * c * c * nx0) >= k2y {
                    q.insert(v);
                }
            }
        }
        (RegularCase::DenseB, q)
    };

    let mut full = f.union(&f0);
    let unpadded_size = full.len();
    if unpadded_size as u64 > target {
        return Err(Error::FingerprintOverflow { size: unpadded_size, target: target as usize });
    }
    let spare: Vec<u64> = a.difference(&full).iter().take(target as usize - unpadded_size).collect();
    if unpadded_size + spare.len() < target as usize {
        return Err(supply(target));
    }
    for v in spare {
        full.insert(v);
    }

    let nx = int(x.len() as u64);
    let guarantees_applicable = mode == Phase1Mode::Exact
        && regular_verify(x, y, kappa).holds
        && 4 * x.len() as u64 <= d * d
        && int(x.len() as u64) >= *l
        && int(4 * f0.len() as u64) <= kappa * &nx
        && int(8 * th.steps) < kappa * int(nx0);

    Ok(RegularContainerResult {
        f: full,
        f0,
        q,
        case,
        y0,
        x0,
        x_hat,
        book,
        phase1_mode: mode,
        phase1_rounds: p1.rounds.len(),
        trace,
        unpadded_size,
        target_size: target,
        thresholds: th,
        heavy_targets,
        phase1_certificate_broken: broken,
        guarantees_applicable,
    })
}
