//! The zero-tolerance suite behind `missing-sums selftest`. Every line here
//! checks a property that holds by construction; one failure means a bug.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::config::RunManifest;
use super::container_cmd::{family, replays, resolve_file, run_procedure};
use super::io::{to_csv, to_json};
use super::verify::dyadic_report;
use super::{Context, Exit, Format, Procedure, SelftestArgs};
use crate::audit::{elementary_inequalities, l_default, l_series};
use crate::container::Phase1Mode;
use crate::error::Result;
use crate::montecarlo::{estimate_tail, lower_bound_check, single_element_exact, threshold_probe, DEFAULT_CONFIDENCE};
use crate::ratio::{self, Prob, Ratio};
use crate::regularity::pollard_verify;
use crate::sets::{decode_compact, encode_compact, representation_counts, sample, sumset, Interval, NatSet, RandomSpec};

#[derive(Clone, Debug, Serialize)]
pub struct SelftestLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn line(name: &str, pass: bool, detail: String) -> SelftestLine {
    SelftestLine { name: name.into(), pass, detail }
}

fn random_set(r: &mut ChaCha8Rng, max_lo: u64, max_len: u64) -> NatSet {
    let lo = r.gen_range(1..=max_lo);
    let len = r.gen_range(1..=max_len);
    let u = Interval::new(lo, lo + len - 1).expect("interval");
    let p = Prob::from_f64(r.gen_range(0.0..1.0f64)).expect("p");
    sample(&RandomSpec::new(p, r.gen(), u))
}

fn sumset_naive(a: &NatSet) -> Vec<u64> {
    let v = a.to_vec();
    let mut out: Vec<u64> = v.iter().flat_map(|&x| v.iter().map(move |&y| x + y)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Outcomes on the elements that matter for `x ∈ A + A`, counted by size:
/// entry `c` is the number of `c`-element outcomes missing `x`.
fn missing_outcomes(x: u64, n: u64) -> Vec<u64> {
    let elems: Vec<u64> = (1..=n).filter(|&a| a < x && x - a <= n).collect();
    let k = elems.len();
    let partner: Vec<usize> = elems.iter().map(|&a| elems.iter().position(|&e| e == x - a).expect("partner")).collect();
    let mut by_size = vec![0u64; k + 1];
    for mask in 0u64..(1u64 << k) {
        let hit = (0..k).any(|i| mask >> i & 1 == 1 && mask >> partner[i] & 1 == 1);
        if !hit {
            by_size[mask.count_ones() as usize] += 1;
        }
    }
    by_size
}

fn enumerated_probability(by_size: &[u64], p: &Prob) -> Ratio {
    let k = by_size.len() - 1;
    let q = Ratio::from_integer(1.into()) - p.exact();
    by_size
        .iter()
        .enumerate()
        .map(|(c, &cnt)| ratio::int(cnt) * num_traits::pow::pow(p.exact().clone(), c) * num_traits::pow::pow(q.clone(), k - c))
        .fold(ratio::int(0), |s, t| s + t)
}

fn container_family(proc_: Procedure, seeds: u64, replay_count: u64) -> SelftestLine {
    let (mut ran, mut skipped, mut bad) = (0u64, 0u64, Vec::new());
    for seed in 0..seeds {
        let r = match resolve_file(family(proc_, seed), l_default(), Phase1Mode::Exact, 2_000_000) {
            Ok(r) => r,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        let Ok(out) = run_procedure(proc_, &r, &r.a, false) else {
            skipped += 1;
            continue;
        };
        ran += 1;
        let failed: Vec<&str> = out.checks.iter().filter(|(_, &v)| !v).map(|(k, _)| *k).collect();
        let reps = replays(proc_, &r, &out, replay_count, seed);
        if !failed.is_empty() || reps.iter().any(|x| !x.matches) {
            bad.push(format!("seed {seed}: {failed:?}"));
        }
    }
    let name = format!("container_{:?}", proc_).to_lowercase();
    let detail = format!("{ran} instances checked with {replay_count}+1 replays, {skipped} outside the input requirements; failures {bad:?}");
    line(&name, bad.is_empty() && ran > 0, detail)
}

/// Runs the suite; `scale` multiplies instance counts and trials.
pub fn run_selftest(scale: u64) -> Vec<SelftestLine> {
    let scale = scale.max(1);
    let mut r = ChaCha8Rng::seed_from_u64(0x5e1f);
    let mut out = Vec::new();

    let mut mism = 0;
    for _ in 0..200 * scale {
        let a = random_set(&mut r, 50, 300);
        if sumset(&a).to_vec() != sumset_naive(&a) {
            mism += 1;
        }
    }
    out.push(line("sumset_vs_naive", mism == 0, format!("{} random sets, {mism} mismatches", 200 * scale)));

    let mut mism = 0;
    for _ in 0..200 * scale {
        let a = random_set(&mut r, 50, 300);
        if decode_compact(&encode_compact(&a)).ok().as_ref() != Some(&a) {
            mism += 1;
        }
    }
    out.push(line("compact_codec_round_trip", mism == 0, format!("{mism} mismatches")));

    let big = sample(&RandomSpec::new(Prob::from_f64(0.7).expect("p"), 11, Interval::first(5000).expect("interval")));
    let fast = representation_counts(&big);
    let v = big.to_vec();
    let mut slow = vec![0u64; fast.len()];
    for (i, &a) in v.iter().enumerate() {
        for &b in &v[i..] {
            slow[(a + b - 2) as usize] += 1;
        }
    }
    out.push(line("representation_counts_fft", fast == slow, format!("|X| = {}", big.len())));

    let p = Prob::from_f64(0.05).expect("p");
    let trials = 2000 * scale;
    let tail = estimate_tail(300, 40, &p, trials, 7, DEFAULT_CONFIDENCE);
    let lb = lower_bound_check(300, 40, &p, trials, 7, DEFAULT_CONFIDENCE);
    let (f1, f2) = match (&tail, &lb) {
        (Ok(t), Ok(l)) => (t.implication_failures, l.implication_failures),
        _ => (u64::MAX, u64::MAX),
    };
    out.push(line(
        "empty_prefix_implies_tail",
        f1 == 0 && f2 == 0,
        format!("{trials} trials at n = 300, m = 40, p = 0.05; failures {f1} and {f2}"),
    ));

    match threshold_probe(100, &[0.25, 0.5, 1.0, 2.0, 4.0], 500 * scale, 3, DEFAULT_CONFIDENCE) {
        Ok(t) => out.push(line(
            "coupled_monotonicity",
            t.coupling_violations == 0 && t.monotone,
            format!("{} coupling violations, monotone = {}", t.coupling_violations, t.monotone),
        )),
        Err(e) => out.push(line("coupled_monotonicity", false, e.to_string())),
    }

    let mut mism = Vec::new();
    let mut cells = 0;
    for x in 2..=20u64 {
        for n in [x - 1, x / 2 + 1, x] {
            if x > 2 * n {
                continue;
            }
            let by_size = missing_outcomes(x, n);
            for p in ["1/10", "1/3", "1/2", "0.85"] {
                let p: Prob = p.parse().expect("p");
                cells += 1;
                if single_element_exact(x, n, &p) != enumerated_probability(&by_size, &p) {
                    mism.push((x, n, p.value()));
                }
            }
        }
    }
    out.push(line("single_element_exact", mism.is_empty(), format!("{cells} cells, mismatches {mism:?}")));

    let ineq = elementary_inequalities(10_000, 16);
    let failing: Vec<&str> = ineq.iter().filter(|c| !c.holds).map(|c| c.id).collect();
    out.push(line("elementary_inequalities", failing.is_empty(), format!("{} checks, failing {failing:?}", ineq.len())));

    let s = l_series();
    let gap = (s.direct - s.closed_form).abs() / s.closed_form;
    out.push(line("l_series", gap < 1e-9 && s.ceiling == 32_756, format!("relative gap {gap:e}, ceiling {}", s.ceiling)));

    let (mut held, mut ran) = (0, 0);
    for _ in 0..100 * scale {
        let x = random_set(&mut r, 20, 60);
        let eps = ratio::frac(r.gen_range(0..45), 100);
        let xx = sumset(&x);
        let width = r.gen_range(1..=xx.universe().size());
        let lo = r.gen_range(xx.universe().lo()..=xx.universe().hi() - width + 1);
        let y = NatSet::from_interval(xx.universe(), Interval::new(lo, lo + width - 1).expect("interval")).expect("window");
        if let Ok(rep) = pollard_verify(&x, &y, &eps) {
            ran += 1;
            held += rep.holds as u64;
        }
    }
    out.push(line("pollard", held == ran && ran > 0, format!("{held} of {ran} applicable instances")));

    let mut inexact = Vec::new();
    for (n, m, p) in [(2000u64, 20u64, "1/10"), (5000, 40, "0.05"), (600, 250, "1/2"), (10_000, 64, "1/32"), (300, 20, "1/3")] {
        let p: Prob = p.parse().expect("p");
        match dyadic_report(n, m, &p, m.max(4)) {
            Ok((_, true)) => {}
            _ => inexact.push((n, m, p.value())),
        }
    }
    out.push(line("dyadic_partition_exact", inexact.is_empty(), format!("inexact {inexact:?}")));

    out.push(container_family(Procedure::Robust, 60 * scale, 2));
    out.push(container_family(Procedure::Iterated, 5 * scale, 2));
    out.push(container_family(Procedure::Regular, 10 * scale, 2));
    out
}

pub fn run(ctx: &Context, args: &SelftestArgs) -> Result<Exit> {
    let lines = run_selftest(args.scale);
    let ok = lines.iter().all(|l| l.pass);
    let csv = to_csv(&lines, &["name", "pass", "detail"])?;
    let json = to_json(&lines)?;
    let mut out = ctx.out.borrow_mut();
    out.file("selftest.csv", &csv)?;
    out.file("selftest.json", &json)?;
    if out.is_stdout() {
        match ctx.format {
            Format::Csv => {
                for l in &lines {
                    println!("{} {}: {}", if l.pass { "PASS" } else { "FAIL" }, l.name, l.detail);
                }
            }
            Format::Json => out.stdout(&json)?,
        }
    }
    out.finish(RunManifest::new("selftest", json!({ "scale": args.scale }), None, &ctx.cfg))?;
    Ok(if ok { Exit::Clean } else { Exit::Violation })
}
