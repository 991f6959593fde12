//! Iterated robust containers over an interval.

use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use super::robust::{robust_pair_container, RobustCase};
use crate::error::{Error, Result};
use crate::ratio::{self, frac, int, Ratio};
use crate::sets::{sumset, Interval, NatSet};

#[derive(Clone, Debug, Serialize)]
pub struct IteratedContainerState {
    pub i: usize,
    pub f: NatSet,
    pub q: NatSet,
    pub z: NatSet,
    #[serde(with = "ratio::serde_ratio")]
    pub alpha: Ratio,
    #[serde(with = "ratio::serde_ratio")]
    pub zeta: Ratio,
    #[serde(with = "ratio::serde_ratio")]
    pub beta: Ratio,
    /// Case taken by the robust procedure in this iteration.
    pub case: RobustCase,
    /// `|Z_{i+1}| + |Q_{i+1}| − |Z_i| − |Q_i|`.
    pub gain: usize,
    /// `|X_i| > 16 β_i⁻³` and `|A| >= 2 sqrt(|X_i|/β_i)` held.
    pub step_preconditions: bool,
}

impl IteratedContainerState {
    pub fn gain_bound_met(&self, x_size: u64) -> bool {
        int(128 * self.gain as u64) >= &self.beta * int(x_size)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IteratedContainerResult {
    pub f: NatSet,
    pub q: NatSet,
    pub z: NatSet,
    pub iterations: usize,
    pub states: Vec<IteratedContainerState>,
    /// `ceil(L T sqrt(d/ε))`.
    pub target_size: u64,
    /// Fingerprint size before padding.
    pub unpadded_size: usize,
    /// Elements chosen by the iterations, in order.
    pub trace: Vec<u64>,
    /// `d >= L T² / ε³`.
    pub guarantees_applicable: bool,
}

/// `ceil(2^11 ln(2T/ε)) · 4`.
pub fn iteration_bound(t: &Ratio, eps: &Ratio) -> usize {
    let v = ratio::to_f64(&(int(2) * t / eps));
    ((2048.0 * v.ln()).ceil().max(1.0) as usize) * 4
}

/// `ceil(L T sqrt(d/ε))`, the exact fingerprint size.
pub fn iterated_target(x: Interval, d: u64, eps: &Ratio, l: &Ratio) -> u64 {
    let t = int(x.size()) / int(d);
    ratio::ceil_sqrt(&(l * l * &t * &t * int(d) / eps))
}

pub fn iterated_container(a: &NatSet, x: Interval, d: u64, eps: &Ratio, l: &Ratio) -> Result<IteratedContainerResult> {
    if d == 0 {
        return Err(Error::PreconditionViolated("d must be positive".into()));
    }
    if !eps.is_positive() || *eps >= frac(1, 2) {
        return Err(Error::PreconditionViolated(format!("eps = {} must lie in (0, 1/2)", ratio::display(eps))));
    }
    if !l.is_positive() {
        return Err(Error::PreconditionViolated("L must be positive".into()));
    }
    let xs = NatSet::full(x);
    let a = a.with_universe(x).map_err(|_| Error::PreconditionViolated("A must be a subset of X".into()))?;
    let xx = sumset(&xs);
    let deficiency = xx.difference(&sumset(&a)).len() as u64;
    if deficiency < d {
        return Err(Error::PreconditionViolated(format!(
            "|(X+X) \\ (A+A)| = {deficiency} is below d = {d}"
        )));
    }
    let target = iterated_target(x, d, eps, l);
    if (a.len() as u64) < target {
        return Err(Error::InsufficientFingerprintSupply { needed: target as usize, available: a.len() });
    }
    let nx = x.size();
    let dd = int(d);
    let t = int(nx) / &dd;
    let guarantees_applicable = &dd * eps * eps * eps >= l * &t * &t;
    let bound = iteration_bound(&t, eps);
    // stop once |Q| >= d/2 − εd, i.e. 2|Q| >= d(1 − 2ε)
    let done = |q: &NatSet| int(2 * q.len() as u64) >= &dd * (Ratio::one() - int(2) * eps);

    let mut f = NatSet::empty(x);
    let mut q = NatSet::empty(x);
    let mut z = NatSet::empty(x.doubled());
    let mut states = Vec::new();
    let mut trace = Vec::new();
    while !done(&q) {
        let i = states.len();
        if i >= bound {
            return Err(Error::IterationGuardTripped { iterations: i, bound, reason: dump(&states) });
        }
        let alpha = frac(1, 2) - int(q.len() as u64) / &dd;
        let zeta = (int(2 * nx) - &dd - int(z.len() as u64)) / &dd;
        let beta = (&alpha + &zeta) / (int(12) * &t);
        let xi = xs.difference(&q);
        let yi = xx.difference(&z);
        let step = robust_pair_container(&a, &xi, &yi, &beta)?;
        if !step.q.is_disjoint(&q) {
            return Err(Error::InvariantViolated(format!("Q_{i} and Q_{i}' overlap")));
        }
        let before = z.len() + q.len();
        let state_f = f.clone();
        let state_q = q.clone();
        let state_z = z.clone();
        f = f.union(&step.f);
        z = z.union(&sumset(&f));
        q = q.union(&step.q);
        trace.extend(step.trace.iter().copied());
        let gain = z.len() + q.len() - before;
        states.push(IteratedContainerState {
            i,
            f: state_f,
            q: state_q,
            z: state_z,
            alpha,
            zeta,
            beta,
            case: step.case,
            gain,
            step_preconditions: step.size_condition && step.supply_condition,
        });
        if gain == 0 {
            return Err(Error::IterationGuardTripped {
                iterations: i + 1,
                bound,
                reason: format!("no progress in iteration {i}; {}", dump(&states)),
            });
        }
    }
    let unpadded_size = f.len();
    if unpadded_size as u64 > target {
        return Err(Error::FingerprintOverflow { size: unpadded_size, target: target as usize });
    }
    let spare: Vec<u64> = a.difference(&f).iter().take(target as usize - unpadded_size).collect();
    if unpadded_size + spare.len() < target as usize {
        return Err(Error::InsufficientFingerprintSupply { needed: target as usize, available: a.len() });
    }
    for v in spare {
        f.insert(v);
    }
    Ok(IteratedContainerResult {
        f,
        q,
        z,
        iterations: states.len(),
        states,
        target_size: target,
        unpadded_size,
        trace,
        guarantees_applicable,
    })
}

fn dump(states: &[IteratedContainerState]) -> String {
    let parts: Vec<String> = states
        .iter()
        .map(|s| {
            format!(
                "i={} |F|={} |Q|={} |Z|={} beta={:.5} gain={}",
                s.i,
                s.f.len(),
                s.q.len(),
                s.z.len(),
                s.beta.to_f64().unwrap_or(f64::NAN),
                s.gain
            )
        })
        .collect();
    parts.join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_interval_is_rejected() {
        let x = Interval::first(30).unwrap();
        let r = iterated_container(&NatSet::full(x), x, 5, &frac(1, 4), &frac(1, 2));
        assert!(matches!(r, Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn target_size_formula() {
        // L T sqrt(d/ε) = 1 · 2 · sqrt(50 · 4) = 28.28...
        let x = Interval::first(100).unwrap();
        assert_eq!(iterated_target(x, 50, &frac(1, 4), &int(1)), 29);
    }

    #[test]
    fn small_instance_structure() {
        let x = Interval::first(600).unwrap();
        // sums below 302 are missed
        let a = NatSet::from_members(x, (151..=600).filter(|v| v % 23 != 0)).unwrap();
        let eps = frac(49, 100);
        let l = int(8);
        let d = 300;
        match iterated_container(&a, x, d, &eps, &l) {
            Ok(r) => {
                assert!(r.f.is_subset(&a));
                assert!(r.q.is_disjoint(&a));
                assert_eq!(r.f.len() as u64, r.target_size);
                let replay = iterated_container(&r.f, x, d, &eps, &l).unwrap();
                assert_eq!((replay.f, replay.q), (r.f, r.q));
            }
            Err(e) => panic!("unexpected {e}"),
        }
    }
}
