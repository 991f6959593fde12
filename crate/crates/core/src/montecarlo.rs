//! Reproducible estimates of sumset-deficiency probabilities for p-random sets.
//!
//! Trial `t` of a run with seed `s` uses stream `t` of the counter generator
//! in [`crate::sets::sample_trial`], so results are the same whatever the
//! number of workers: each trial is a pure function of `(s, t)` and only
//! integer counts are aggregated.

use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::inv_beta_reg;

use crate::audit::{bound_main, AuditConfig, LogValue};
use crate::error::{Error, Result};
use crate::ratio::{self, int, Prob, Ratio};
use crate::sets::{deficiency_at_least, sample_coupled, sample_trial, sumset, Interval, NatSet, RandomSpec};

pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// Runs `f` on a pool of `workers` threads, or on the global pool for `None`.
pub fn with_workers<T: Send, F: FnOnce() -> T + Send>(workers: Option<usize>, f: F) -> T {
    match workers {
        None => f(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map(|pool| pool.install(f))
            .unwrap_or_else(|_| panic!("could not start {w} worker threads")),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub events: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
    pub seed: u64,
}

/// Clopper–Pearson interval for `events` successes in `trials`.
pub fn clopper_pearson(events: u64, trials: u64, confidence: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let alpha = 1.0 - confidence;
    let (k, n) = (events as f64, trials as f64);
    let lo = if events == 0 { 0.0 } else { inv_beta_reg(k, n - k + 1.0, alpha / 2.0) };
    let hi = if events == trials { 1.0 } else { inv_beta_reg(k + 1.0, n - k, 1.0 - alpha / 2.0) };
    (lo, hi)
}

impl TailEstimate {
    pub fn from_counts(events: u64, trials: u64, confidence: f64, seed: u64) -> Self {
        let p_hat = if trials == 0 { 0.0 } else { events as f64 / trials as f64 };
        let (lo, hi) = clopper_pearson(events, trials, confidence);
        TailEstimate { events, trials, p_hat, ci_low: lo.min(p_hat), ci_high: hi.max(p_hat), confidence, seed }
    }

    pub fn contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }

    /// `events / trials` as an exact fraction.
    pub fn p_hat_exact(&self) -> Ratio {
        if self.trials == 0 {
            return int(0);
        }
        Ratio::new(int(self.events).to_integer(), int(self.trials).to_integer())
    }
}

fn count_events<F: Fn(u64) -> bool + Sync>(trials: u64, event: F) -> u64 {
    (0..trials).into_par_iter().map(|t| event(t) as u64).sum()
}

fn universe(n: u64) -> Result<Interval> {
    Interval::first(n)
}

#[derive(Clone, Debug, Serialize)]
pub struct TailReport {
    pub n: u64,
    pub m: u64,
    pub p: Prob,
    pub estimate: TailEstimate,
    /// `m <= 2n/3`.
    pub in_range: bool,
    /// Upper bound on `Pr(some x > 2n is missed)` for a p-random subset of all naturals.
    pub truncation: LogValue,
    /// Trials with `A ∩ [1, ⌈m/2⌉] = ∅` but deficiency below `m`; always 0.
    pub implication_failures: u64,
}

/// `Σ_{x > 2n} (1-p)^(p(x-1)/4) = (1-p)^(np/2) / (1 - (1-p)^(p/4))`.
pub fn truncation_bound(n: u64, p: f64) -> LogValue {
    if p <= 0.0 {
        return LogValue(f64::INFINITY);
    }
    let l1 = (-p).ln_1p();
    let num = n as f64 * p / 2.0 * l1;
    let den = -(p / 4.0 * l1).exp_m1();
    LogValue(num - den.ln())
}

/// `Pr(|[2n] \ (A+A)| >= m)` for `A` a p-random subset of `[n]`.
pub fn estimate_tail(n: u64, m: u64, p: &Prob, trials: u64, seed: u64, confidence: f64) -> Result<TailReport> {
    let spec = RandomSpec::new(p.clone(), seed, universe(n)?);
    let window = Interval::new(1, 2 * n)?;
    let h = m.div_ceil(2).min(n);
    let (events, implication_failures) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let a = sample_trial(&spec, t);
            let hit = deficiency_at_least(&a, window, m);
            let forced = m.div_ceil(2) <= n && (h == 0 || a.count_in(1, h) == 0);
            (hit as u64, (forced && !hit) as u64)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(TailReport {
        n,
        m,
        p: p.clone(),
        estimate: TailEstimate::from_counts(events, trials, confidence, seed),
        in_range: 3 * m <= 2 * n,
        truncation: truncation_bound(n, p.value()),
        implication_failures,
    })
}

/// `|[2n] \ (A+A)|`.
pub fn deficiency(a: &NatSet) -> u64 {
    let n = a.universe().hi();
    2 * n - a.universe().lo() + 1 - sumset(a).len() as u64
}

/// Empirical distribution of `|[2n] \ (A+A)|`.
pub fn deficiency_histogram(n: u64, p: &Prob, trials: u64, seed: u64) -> Result<BTreeMap<u64, u64>> {
    let spec = RandomSpec::new(p.clone(), seed, universe(n)?);
    let hist = (0..trials)
        .into_par_iter()
        .fold(BTreeMap::new, |mut h: BTreeMap<u64, u64>, t| {
            *h.entry(deficiency(&sample_trial(&spec, t))).or_default() += 1;
            h
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    Ok(hist)
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundReport {
    pub empirical: TailEstimate,
    #[serde(with = "crate::ratio::serde_ratio")]
    pub exact: Ratio,
    pub exact_value: f64,
    /// Every trial with `A ∩ [1, ⌈m/2⌉] = ∅` had deficiency at least `m`.
    pub implies_tail: bool,
    pub implication_failures: u64,
}

/// Frequency of `A ∩ [1, ⌈m/2⌉] = ∅` against its exact probability `(1-p)^⌈m/2⌉`.
pub fn lower_bound_check(n: u64, m: u64, p: &Prob, trials: u64, seed: u64, confidence: f64) -> Result<LowerBoundReport> {
    let h = m.div_ceil(2);
    if h > n {
        return Err(Error::PreconditionViolated(format!("ceil(m/2) = {h} exceeds n = {n}")));
    }
    let spec = RandomSpec::new(p.clone(), seed, universe(n)?);
    let window = Interval::new(1, 2 * n)?;
    let (events, failures) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let a = sample_trial(&spec, t);
            let hit = h > 0 && a.count_in(1, h) > 0;
            if hit {
                return (0u64, 0u64);
            }
            let ok = deficiency_at_least(&a, window, m);
            (1, (!ok) as u64)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    let q = Ratio::one() - p.exact();
    let exact = num_traits::pow::pow(q, h as usize);
    let exact_value = pow_f64(p.value(), h as f64);
    Ok(LowerBoundReport {
        empirical: TailEstimate::from_counts(events, trials, confidence, seed),
        exact,
        exact_value,
        implies_tail: failures == 0,
        implication_failures: failures,
    })
}

/// `(1-p)^k` through logarithms.
fn pow_f64(p: f64, k: f64) -> f64 {
    if k == 0.0 {
        return 1.0;
    }
    (k * (-p).ln_1p()).exp()
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdRow {
    pub c: f64,
    pub p: Prob,
    pub estimate: TailEstimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdReport {
    pub m: u64,
    pub n: u64,
    pub rows: Vec<ThresholdRow>,
    /// Coupled trials where a larger `p` gave a smaller set, a smaller sumset
    /// or a larger deficiency.
    pub coupling_violations: u64,
    /// `p_hat` is non-increasing in `c`.
    pub monotone: bool,
}

/// Tail estimates along `p = c/sqrt(m)` at `n = 2m`, with all `c` coupled
/// through shared uniforms.
pub fn threshold_probe(m: u64, cs: &[f64], trials: u64, seed: u64, confidence: f64) -> Result<ThresholdReport> {
    let n = 2 * m;
    let root = (m as f64).sqrt();
    let ps: Vec<Prob> = cs
        .iter()
        .map(|&c| {
            let p = c / root;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::PreconditionViolated(format!("p = c/sqrt(m) = {p} outside [0, 1]")));
            }
            Prob::from_f64(p)
        })
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..ps.len()).collect();
    order.sort_by(|&i, &j| ps[i].exact().cmp(ps[j].exact()));
    let u = universe(n)?;
    let k = ps.len();
    let (events, violations) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let sets = sample_coupled(seed, t, u, &ps);
            let sums: Vec<NatSet> = sets.iter().map(sumset).collect();
            let defs: Vec<u64> = sums.iter().map(|s| 2 * n - s.len() as u64).collect();
            let mut bad = 0u64;
            for w in order.windows(2) {
                let (i, j) = (w[0], w[1]);
                if !sets[i].is_subset(&sets[j]) || !sums[i].is_subset(&sums[j]) || defs[j] > defs[i] {
                    bad += 1;
                }
            }
            let ev: Vec<u64> = defs.iter().map(|&d| (d >= m) as u64).collect();
            (ev, bad)
        })
        .reduce(
            || (vec![0; k], 0),
            |mut a, b| {
                for (x, y) in a.0.iter_mut().zip(&b.0) {
                    *x += y;
                }
                (a.0, a.1 + b.1)
            },
        );
    let rows: Vec<ThresholdRow> = cs
        .iter()
        .zip(&ps)
        .zip(&events)
        .map(|((&c, p), &e)| ThresholdRow { c, p: p.clone(), estimate: TailEstimate::from_counts(e, trials, confidence, seed) })
        .collect();
    let mut by_c: Vec<&ThresholdRow> = rows.iter().collect();
    by_c.sort_by(|a, b| a.c.total_cmp(&b.c));
    let monotone = by_c.windows(2).all(|w| w[1].estimate.events <= w[0].estimate.events);
    Ok(ThresholdReport { m, n, rows, coupling_violations: violations, monotone })
}

#[derive(Clone, Debug, Serialize)]
pub struct MiddleReport {
    pub empirical: TailEstimate,
    pub bound: f64,
    /// The interval `(2M/p, 2n - 2M/p)` as integers, empty when vacuous.
    pub lo: u64,
    pub hi: u64,
    /// `2M/p >= n`; nothing is simulated.
    pub vacuous: bool,
}

/// `Pr((2M/p, 2n - 2M/p) ⊄ A + A)` against `min(1, 8 p^-2 (1-p^2)^(M/(2p)))`.
pub fn middle_coverage(n: u64, big_m: u64, p: &Prob, trials: u64, seed: u64, confidence: f64) -> Result<MiddleReport> {
    let pv = p.value();
    let bound = if p.is_zero() {
        1.0
    } else {
        let ln = (8.0 / (pv * pv)).ln() + big_m as f64 / (2.0 * pv) * (-pv * pv).ln_1p();
        ln.exp().min(1.0)
    };
    let vacuous = p.is_zero() || {
        let t = int(2 * big_m) / p.exact();
        t >= int(n)
    };
    if vacuous {
        return Ok(MiddleReport { empirical: TailEstimate::from_counts(0, trials, confidence, seed), bound, lo: 0, hi: 0, vacuous });
    }
    let t = int(2 * big_m) / p.exact();
    let lo = ratio::floor_u64(&t) + 1;
    let hi = ratio::ceil_u64(&(int(2 * n) - &t)) - 1;
    let spec = RandomSpec::new(p.clone(), seed, universe(n)?);
    let width = (hi + 1).saturating_sub(lo) as usize;
    let events = count_events(trials, |tr| {
        let s = sumset(&sample_trial(&spec, tr));
        width > 0 && s.count_in(lo, hi) < width
    });
    Ok(MiddleReport { empirical: TailEstimate::from_counts(events, trials, confidence, seed), bound, lo, hi, vacuous })
}

#[derive(Clone, Debug, Serialize)]
pub struct SingleElementReport {
    pub empirical: TailEstimate,
    #[serde(with = "crate::ratio::serde_ratio")]
    pub exact: Ratio,
    pub exact_value: f64,
    pub stated_bound: f64,
    /// Every pair `{a, x - a}` lies in `[n]`, so the closed-form bound applies.
    pub bound_applies: bool,
}

/// `Pr(x ∉ A + A)` as a product over the pairs `{a, x - a}` inside `[n]`.
pub fn single_element_exact(x: u64, n: u64, p: &Prob) -> Ratio {
    let q1 = Ratio::one() - p.exact();
    let q2 = Ratio::one() - p.exact() * p.exact();
    let mut pairs = 0usize;
    let mut diag = 0usize;
    for a in 1..=x / 2 {
        if x - a > n {
            continue;
        }
        if 2 * a == x {
            diag += 1;
        } else {
            pairs += 1;
        }
    }
    num_traits::pow::pow(q2, pairs) * num_traits::pow::pow(q1, diag)
}

pub fn single_element_tail(x: u64, n: u64, p: &Prob, trials: u64, seed: u64, confidence: f64) -> Result<SingleElementReport> {
    if x < 2 || x > 2 * n {
        return Err(Error::PreconditionViolated(format!("need 2 <= x <= 2n (x = {x}, n = {n})")));
    }
    let exact = single_element_exact(x, n, p);
    let exact_value = exact.to_f64().unwrap_or(f64::NAN);
    let pv = p.value();
    let stated_bound = pow_f64(pv, pv * (x - 1) as f64 / 4.0);
    // only elements below x matter, and they draw the same uniforms in [1, x-1]
    let top = (x - 1).min(n);
    let spec = RandomSpec::new(p.clone(), seed, universe(top)?);
    let events = count_events(trials, |t| {
        let a = sample_trial(&spec, t);
        !(x.div_ceil(2)..=top).any(|b| a.contains(b) && a.contains(x - b))
    });
    Ok(SingleElementReport {
        empirical: TailEstimate::from_counts(events, trials, confidence, seed),
        exact,
        exact_value,
        stated_bound,
        bound_applies: x - 1 <= n,
    })
}

/// A grid of tail experiments; each `(n, m, p)` cell is simulated once and
/// compared against the main bound for every `eps`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGrid {
    pub n: Vec<u64>,
    pub m: Vec<u64>,
    pub p: Vec<Prob>,
    pub eps: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridRow {
    pub n: u64,
    pub m: u64,
    pub p: f64,
    pub eps: f64,
    pub trials: u64,
    pub events: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bound: f64,
    pub flag: String,
    #[serde(skip)]
    pub implication_failures: u64,
}

impl GridRow {
    pub fn hypotheses_hold(&self) -> bool {
        !self.flag.split('|').any(|f| f == "hypotheses_fail")
    }

    pub fn violated(&self) -> bool {
        self.flag.split('|').any(|f| f == "bound_exceeded")
    }
}

/// Runs every cell. Flags: `out_of_range` (`m > 2n/3`), `hypotheses_fail`,
/// `unresolvable` (bound below `3/trials`) and `bound_exceeded`, the last
/// raised only where the hypotheses hold and the upper confidence limit
/// exceeds the bound.
pub fn run_grid(grid: &ExperimentGrid, cfg: &AuditConfig, confidence: f64) -> Result<Vec<GridRow>> {
    let mut rows = Vec::new();
    for &n in &grid.n {
        for &m in &grid.m {
            for p in &grid.p {
                let tail = estimate_tail(n, m, p, grid.trials, grid.seed, confidence)?;
                let est = &tail.estimate;
                for &eps in &grid.eps {
                    let b = bound_main(m, p.value(), eps, cfg);
                    let bound = b.value();
                    let mut flags = Vec::new();
                    if !tail.in_range {
                        flags.push("out_of_range");
                    }
                    if !b.hypotheses_hold {
                        flags.push("hypotheses_fail");
                    }
                    if bound < 3.0 / grid.trials.max(1) as f64 {
                        flags.push("unresolvable");
                    }
                    if b.hypotheses_hold && est.ci_high > bound {
                        flags.push("bound_exceeded");
                    }
                    rows.push(GridRow {
                        n,
                        m,
                        p: p.value(),
                        eps,
                        trials: est.trials,
                        events: est.events,
                        p_hat: est.p_hat,
                        ci_low: est.ci_low,
                        ci_high: est.ci_high,
                        bound,
                        flag: if flags.is_empty() { "ok".into() } else { flags.join("|") },
                        implication_failures: tail.implication_failures,
                    });
                }
            }
        }
    }
    Ok(rows)
}
