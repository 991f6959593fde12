//! Counter-based p-random subsets.
//!
//! The uniform attached to element `x` in trial `t` is the 64-bit word at
//! position `2x` of the ChaCha8 stream `t` keyed by the seed. Membership is
//! `u < floor(p * 2^64)`, so the sample does not depend on evaluation order,
//! and samples at different `p` taken from the same stream are nested.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Interval, NatSet};
use crate::ratio::{self, Prob};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub p: Prob,
    pub seed: u64,
    pub universe: Interval,
}

impl RandomSpec {
    pub fn new(p: Prob, seed: u64, universe: Interval) -> Self {
        RandomSpec { p, seed, universe }
    }
}

/// `None` means every element is included.
pub fn inclusion_threshold(p: &Prob) -> Option<u64> {
    if p.is_one() {
        return None;
    }
    let scaled = p.exact() * ratio::Ratio::from_integer(BigInt::from(1u128 << 64));
    Some(scaled.floor().to_integer().to_u64().unwrap_or(u64::MAX))
}

fn stream(seed: u64, trial: u64, start: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng.set_word_pos(2 * start as u128);
    rng
}

/// The sample of trial 0.
pub fn sample(spec: &RandomSpec) -> NatSet {
    sample_trial(spec, 0)
}

/// The sample of trial `trial`, an independent stream under the same seed.
pub fn sample_trial(spec: &RandomSpec, trial: u64) -> NatSet {
    let u = spec.universe;
    let mut out = NatSet::empty(u);
    match inclusion_threshold(&spec.p) {
        None => return NatSet::full(u),
        Some(0) => return out,
        Some(t) => {
            let mut rng = stream(spec.seed, trial, u.lo());
            for x in u.iter() {
                if rng.next_u64() < t {
                    out.insert(x);
                }
            }
        }
    }
    out
}

/// Samples for several probabilities sharing one trial's uniforms; if
/// `p <= p'` the first sample is a subset of the second.
pub fn sample_coupled(seed: u64, trial: u64, universe: Interval, ps: &[Prob]) -> Vec<NatSet> {
    let thresholds: Vec<Option<u64>> = ps.iter().map(inclusion_threshold).collect();
    let mut out: Vec<NatSet> = ps.iter().map(|_| NatSet::empty(universe)).collect();
    let mut rng = stream(seed, trial, universe.lo());
    for x in universe.iter() {
        let v = rng.next_u64();
        for (set, t) in out.iter_mut().zip(&thresholds) {
            if t.is_none_or(|t| v < t) {
                set.insert(x);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: f64, seed: u64, n: u64) -> RandomSpec {
        RandomSpec::new(Prob::from_f64(p).unwrap(), seed, Interval::first(n).unwrap())
    }

    #[test]
    fn extreme_probabilities() {
        assert!(sample(&spec(0.0, 1, 100)).is_empty());
        assert_eq!(sample(&spec(1.0, 1, 100)).len(), 100);
    }

    #[test]
    fn reproducible_and_trial_dependent() {
        let s = spec(0.5, 42, 500);
        assert_eq!(sample(&s), sample(&s));
        assert_ne!(sample_trial(&s, 1), sample_trial(&s, 2));
    }

    #[test]
    fn independent_of_universe_start() {
        // element x draws the same uniform whatever interval it sits in
        let whole = sample(&spec(0.3, 9, 400));
        let part = sample(&RandomSpec::new(
            Prob::from_f64(0.3).unwrap(),
            9,
            Interval::new(150, 260).unwrap(),
        ));
        let restricted: Vec<u64> = whole.iter().filter(|x| (150..=260).contains(x)).collect();
        assert_eq!(part.to_vec(), restricted);
    }

    #[test]
    fn coupled_samples_are_nested() {
        let ps: Vec<Prob> = [0.1, 0.2, 0.5].iter().map(|&p| Prob::from_f64(p).unwrap()).collect();
        let u = Interval::first(1000).unwrap();
        let sets = sample_coupled(5, 3, u, &ps);
        assert!(sets[0].is_subset(&sets[1]) && sets[1].is_subset(&sets[2]));
        assert_eq!(sets[1], sample_trial(&RandomSpec::new(ps[1].clone(), 5, u), 3));
    }

    #[test]
    fn threshold_is_exact() {
        assert_eq!(inclusion_threshold(&Prob::from_f64(0.5).unwrap()), Some(1u64 << 63));
        assert_eq!(inclusion_threshold(&Prob::from_f64(0.0).unwrap()), Some(0));
        assert_eq!(inclusion_threshold(&Prob::from_f64(1.0).unwrap()), None);
    }
}
