use serde_json::json;

use super::config::RunManifest;
use super::io::{need, pick_ratio, to_json, InstanceFile};
use super::{Check, Context, Exit, VerifyArgs};
use crate::error::{Error, Result};
use crate::ratio::{self, frac, Prob};
use crate::regularity::{
    dyadic_partition, dyadic_target, pollard_verify, regular_verify, robust_bruteforce, robust_heuristic, DyadicLayer,
};
use crate::sets::NatSet;

/// Exactness of the layering and the sum-regularity of each lower layer.
pub fn dyadic_report(n: u64, m: u64, p: &Prob, d: u64) -> Result<(serde_json::Value, bool)> {
    let layers = dyadic_partition(n, m, p, d)?;
    let target = dyadic_target(n, m, p)?;
    let mut union = NatSet::empty(target.universe());
    let mut disjoint = true;
    for l in &layers {
        disjoint &= union.is_disjoint(&l.y);
        union = union.union(&l.y);
    }
    let exact = disjoint && union.same_members(&target);
    let top = layers.len() - 1;
    let rows: Vec<serde_json::Value> = layers
        .iter()
        .enumerate()
        .map(|(i, l): (usize, &DyadicLayer)| {
            let reg = (i < top).then(|| regular_verify(&l.x, &l.y, &frac(1, 4)));
            json!({
                "j": l.j,
                "x": l.x.len(),
                "y": l.y.len(),
                "d_j": l.d_j,
                "quarter_regular": reg.as_ref().map(|r| r.holds),
                "min_ratio": reg.as_ref().and_then(|r| r.min_ratio.as_ref().map(ratio::display)),
            })
        })
        .collect();
    let report = json!({
        "n": n, "m": m, "p": p.value(), "d": d,
        "disjoint": disjoint,
        "covers_target": union.same_members(&target),
        "exact": exact,
        "layers": rows,
    });
    Ok((report, exact))
}

pub fn run(ctx: &Context, args: &VerifyArgs) -> Result<Exit> {
    let file = match &args.instance {
        Some(p) => InstanceFile::load(p)?,
        None => InstanceFile::default(),
    };
    let (report, clean) = match args.check {
        Check::Pollard => {
            let eps = need(&pick_ratio(&args.eps, &file.eps, "eps")?, "eps")?;
            let r = pollard_verify(&need(&file.x, "x")?, &need(&file.y, "y")?, &eps)?;
            let holds = r.holds;
            (json!({ "check": "pollard", "holds": holds, "report": r }), holds)
        }
        Check::Robust => {
            let beta = need(&pick_ratio(&args.beta, &file.beta, "beta")?, "beta")?;
            let (x, y) = (need(&file.x, "x")?, need(&file.y, "y")?);
            match robust_bruteforce(&x, &y, &beta, args.cap) {
                Ok(r) => (json!({ "check": "robust", "holds": r.robust, "exhaustive": true, "report": r }), true),
                Err(Error::BudgetExceeded { needed, cap }) => {
                    let h = robust_heuristic(&x, &y, &beta);
                    let note = format!("{needed} removal sets exceed the cap {cap}; adversarial search only");
                    (json!({ "check": "robust", "holds": null, "exhaustive": false, "note": note, "report": h }), true)
                }
                Err(e) => return Err(e),
            }
        }
        Check::Regular => {
            let kappa = need(&pick_ratio(&args.kappa, &file.kappa, "kappa")?, "kappa")?;
            let r = regular_verify(&need(&file.x, "x")?, &need(&file.y, "y")?, &kappa);
            (json!({ "check": "regular", "holds": r.holds, "report": r }), true)
        }
        Check::Dyadic => {
            let n = need(&args.n.or(file.n), "n")?;
            let m = need(&args.m.or(file.m), "m")?;
            let p = match &args.p {
                Some(t) => t.parse::<Prob>()?,
                None => need(&file.p, "p")?,
            };
            let d = args.d.or(file.d).unwrap_or(m);
            let (r, exact) = dyadic_report(n, m, &p, d)?;
            (json!({ "check": "dyadic", "holds": exact, "report": r }), exact)
        }
    };
    let mut report = report;
    report["instance"] = json!(args.instance.as_ref().map(|p| p.display().to_string()));
    let text = to_json(&report)?;
    let mut out = ctx.out.borrow_mut();
    out.file("verify.json", &text)?;
    out.stdout(&text)?;
    let params = json!({
        "check": format!("{:?}", args.check).to_lowercase(),
        "instance": args.instance.as_ref().map(|p| p.display().to_string()),
        "cap": args.cap.to_string(),
    });
    out.finish(RunManifest::new("verify", params, None, &ctx.cfg))?;
    Ok(if clean { Exit::Clean } else { Exit::Violation })
}
