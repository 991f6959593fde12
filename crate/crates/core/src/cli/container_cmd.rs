use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::json;

use super::config::RunManifest;
use super::io::{need, pick_ratio, to_json, InstanceFile};
use super::{ContainerArgs, Context, Exit, Phase1Arg, Procedure};
use crate::container::{
    iterated_container, regular_container, robust_pair_container, ContainerCertificate, Phase1Mode, RegularParams,
};
use crate::error::{Error, Result};
use crate::instances::{iterated_instance, regular_guarantee_instance, robust_instance, sub_superset};
use crate::ratio::{self, Ratio};
use crate::regularity::robust_bruteforce;
use crate::sets::{Interval, NatSet};

/// One run of a procedure on a given `A`.
pub struct Outcome {
    pub certificate: ContainerCertificate,
    pub f: NatSet,
    pub q: NatSet,
    /// Zero-tolerance structural checks.
    pub checks: BTreeMap<&'static str, bool>,
    pub details: serde_json::Value,
}

#[derive(Serialize)]
pub struct Replay {
    pub source: String,
    pub size: usize,
    pub matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Parameters resolved from the instance file, the family and the flags.
pub struct Resolved {
    pub a: NatSet,
    pub x: NatSet,
    pub y: Option<NatSet>,
    pub beta: Option<Ratio>,
    pub d: Option<u64>,
    pub eps: Option<Ratio>,
    pub l: Option<Ratio>,
    pub kappa: Option<Ratio>,
    pub mode: Phase1Mode,
    pub cap: u128,
}

pub(super) fn family(proc_: Procedure, seed: u64) -> InstanceFile {
    match proc_ {
        Procedure::Robust => {
            let r = robust_instance(seed);
            InstanceFile { a: Some(r.a), x: Some(r.x), y: Some(r.y), beta: Some(r.beta), ..Default::default() }
        }
        Procedure::Iterated => {
            let r = iterated_instance(seed);
            InstanceFile {
                a: Some(r.a),
                x: Some(NatSet::full(r.x)),
                d: Some(r.d),
                eps: Some(r.eps),
                l: Some(r.l),
                ..Default::default()
            }
        }
        Procedure::Regular => {
            let r = regular_guarantee_instance(seed);
            InstanceFile {
                a: Some(r.a),
                x: Some(r.x),
                y: Some(r.y),
                d: Some(r.d),
                kappa: Some(r.kappa),
                l: Some(r.l),
                ..Default::default()
            }
        }
    }
}

fn resolve(ctx: &Context, args: &ContainerArgs) -> Result<Resolved> {
    let mut file = match &args.instance {
        Some(p) => InstanceFile::load(p)?,
        None => family(args.procedure, ctx.seed),
    };
    file.beta = pick_ratio(&args.beta, &file.beta, "beta")?;
    file.eps = pick_ratio(&args.eps, &file.eps, "eps")?;
    file.l = pick_ratio(&args.l, &file.l, "l")?;
    file.kappa = pick_ratio(&args.kappa, &file.kappa, "kappa")?;
    file.d = args.d.or(file.d);
    let mode = match args.phase1 {
        Phase1Arg::Exact => Phase1Mode::Exact,
        Phase1Arg::Greedy => Phase1Mode::Greedy,
    };
    resolve_file(file, ctx.cfg.audit.l, mode, args.cap)
}

/// `default_l` is used when the instance carries no `l`.
pub(super) fn resolve_file(file: InstanceFile, default_l: f64, mode: Phase1Mode, cap: u128) -> Result<Resolved> {
    Ok(Resolved {
        a: need(&file.a, "a")?,
        x: need(&file.x, "x")?,
        y: file.y,
        beta: file.beta,
        d: file.d,
        eps: file.eps,
        l: match file.l {
            Some(l) => Some(l),
            None => Some(ratio::from_f64(default_l)?),
        },
        kappa: file.kappa,
        mode,
        cap,
    })
}

fn as_interval(x: &NatSet) -> Result<Interval> {
    let (lo, hi) = (x.min(), x.max());
    match (lo, hi) {
        (Some(lo), Some(hi)) if (hi - lo + 1) as usize == x.len() => Interval::new(lo, hi),
        _ => Err(Error::PreconditionViolated("X must be a nonempty interval for the iterated procedure".into())),
    }
}

/// Runs the procedure on `a` in place of the instance's `A`; `verify` asks the
/// robust procedure to certify robustness exhaustively when the cap allows.
pub fn run_procedure(proc_: Procedure, r: &Resolved, a: &NatSet, verify: bool) -> Result<Outcome> {
    let mut checks = BTreeMap::new();
    match proc_ {
        Procedure::Robust => {
            let y = need(&r.y, "y")?;
            let beta = need(&r.beta, "beta")?;
            let res = robust_pair_container(a, &r.x, &y, &beta)?;
            let verified = verify
                && match robust_bruteforce(&r.x, &y, &beta, r.cap) {
                    Ok(rep) => rep.robust,
                    Err(Error::BudgetExceeded { .. }) => false,
                    Err(e) => return Err(e),
                };
            checks.insert("f_subset_a", res.f.is_subset(a));
            checks.insert("q_disjoint_a", res.q.is_disjoint(a));
            checks.insert("book_consistent", res.book.is_consistent());
            if &beta * ratio::int(r.x.len() as u64) * ratio::int(4) >= ratio::int(1) {
                checks.insert("frozen_caps", res.frozen_caps_hold(&beta));
            }
            let details = json!({
                "thresholds": res.thresholds,
                "pairs": res.book.len(),
                "sumset_hits": res.sumset_hits,
                "size_condition": res.size_condition,
                "supply_condition": res.supply_condition,
                "robust_verified": verified,
                "guarantee_met": res.guarantee_met(&beta),
            });
            let certificate = ContainerCertificate::from_robust(&res, verified);
            Ok(Outcome { certificate, f: res.f, q: res.q, checks, details })
        }
        Procedure::Iterated => {
            let x = as_interval(&r.x)?;
            let d = need(&r.d, "d")?;
            let eps = need(&r.eps, "eps")?;
            let l = need(&r.l, "l")?;
            let res = iterated_container(a, x, d, &eps, &l)?;
            let a_in = a.with_universe(x).map_err(|_| Error::PreconditionViolated("A must be a subset of X".into()))?;
            checks.insert("f_subset_a", res.f.is_subset(&a_in));
            checks.insert("q_disjoint_a", res.q.is_disjoint(&a_in));
            checks.insert("padded_size", res.f.len() as u64 == res.target_size);
            let gains: Vec<bool> = res.states.iter().map(|s| s.gain_bound_met(r.x.len() as u64 - s.q.len() as u64)).collect();
            let details = json!({
                "target_size": res.target_size,
                "unpadded_size": res.unpadded_size,
                "states": res.states.iter().map(|s| json!({
                    "i": s.i, "beta": ratio::display(&s.beta), "case": s.case.tag(), "gain": s.gain,
                    "step_preconditions": s.step_preconditions,
                })).collect::<Vec<_>>(),
                "gain_bound_met": gains,
            });
            let certificate = ContainerCertificate::from_iterated(&res);
            Ok(Outcome { certificate, f: res.f, q: res.q, checks, details })
        }
        Procedure::Regular => {
            let y = need(&r.y, "y")?;
            let kappa = need(&r.kappa, "kappa")?;
            let d = need(&r.d, "d")?;
            let l = need(&r.l, "l")?;
            let params = RegularParams { kappa: &kappa, d, l: &l, mode: r.mode, size_cap: r.cap };
            let res = regular_container(a, &r.x, &y, &params)?;
            checks.insert("f_subset_a", res.f.is_subset(a));
            checks.insert("q_disjoint_a", res.q.is_disjoint(a));
            checks.insert("padded_size", res.f.len() as u64 == res.target_size);
            checks.insert("column_cap", res.column_cap_holds());
            let details = json!({
                "target_size": res.target_size,
                "unpadded_size": res.unpadded_size,
                "thresholds": res.thresholds,
                "y0": res.y0.len(),
                "x0": res.x0.len(),
                "pairs": res.book.len(),
                "heavy_targets": res.heavy_targets,
                "row_cap": res.row_cap_holds(),
                "column_cap_unrounded": res.column_cap_unrounded(),
                "phase1_certificate_broken": res.phase1_certificate_broken,
                "guarantee_met": res.guarantee_met(&kappa, r.x.len()),
            });
            let certificate = ContainerCertificate::from_regular(&res);
            Ok(Outcome { certificate, f: res.f, q: res.q, checks, details })
        }
    }
}

/// Re-runs on `F` and on `count` random sets between `F` and `A`; each must
/// reproduce `(F, Q)`.
pub fn replays(proc_: Procedure, r: &Resolved, base: &Outcome, count: u64, seed: u64) -> Vec<Replay> {
    let f_in_a = base.f.with_universe(r.a.universe()).unwrap_or_else(|_| base.f.clone());
    let mut sources = vec![("F".to_string(), f_in_a.clone())];
    for k in 0..count {
        let s = seed.wrapping_add(k);
        sources.push((format!("sub_superset:{s}"), sub_superset(&r.a, &f_in_a, s)));
    }
    sources
        .into_iter()
        .map(|(source, a2)| {
            let size = a2.len();
            match run_procedure(proc_, r, &a2, false) {
                Ok(o) => Replay { source, size, matches: o.f.same_members(&base.f) && o.q.same_members(&base.q), error: None },
                Err(e) => Replay { source, size, matches: false, error: Some(e.to_string()) },
            }
        })
        .collect()
}

pub fn run(ctx: &Context, args: &ContainerArgs) -> Result<Exit> {
    let r = resolve(ctx, args)?;
    let base = run_procedure(args.procedure, &r, &r.a, true)?;
    let reps = replays(args.procedure, &r, &base, args.replays, ctx.seed);
    let clean = base.checks.values().all(|&v| v) && reps.iter().all(|x| x.matches);
    let name = format!("{:?}", args.procedure).to_lowercase();
    let report = json!({
        "procedure": name,
        "certificate": base.certificate,
        "checks": base.checks,
        "replays": reps,
        "details": base.details,
    });
    let text = to_json(&report)?;
    let mut out = ctx.out.borrow_mut();
    out.file("certificate.json", &to_json(&base.certificate)?)?;
    out.file("container.json", &text)?;
    out.stdout(&text)?;
    let params = json!({
        "procedure": name,
        "instance": args.instance.as_ref().map(|p| p.display().to_string()),
        "phase1": format!("{:?}", args.phase1).to_lowercase(),
        "replays": args.replays,
        "cap": args.cap.to_string(),
    });
    out.finish(RunManifest::new("container", params, Some(ctx.seed), &ctx.cfg))?;
    if !clean {
        for (k, v) in &base.checks {
            if !v {
                eprintln!("check failed: {k}");
            }
        }
        for x in reps.iter().filter(|x| !x.matches) {
            eprintln!("replay on {} did not reproduce (F, Q){}", x.source, x.error.as_deref().map(|e| format!(": {e}")).unwrap_or_default());
        }
        return Ok(Exit::Violation);
    }
    Ok(Exit::Clean)
}
