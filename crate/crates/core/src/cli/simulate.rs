use serde::Serialize;
use serde_json::json;

use super::config::RunManifest;
use super::io::{read_text, to_csv, to_json};
use super::{Context, Exit, Format, SimulateArgs};
use crate::error::{Error, Result};
use crate::montecarlo::{deficiency_histogram, run_grid, ExperimentGrid, GridRow};
use crate::ratio::Prob;

pub const TAIL_HEADER: [&str; 11] = ["n", "m", "p", "eps", "trials", "events", "p_hat", "ci_low", "ci_high", "bound", "flag"];

#[derive(Serialize)]
struct HistRow {
    n: u64,
    p: f64,
    deficiency: u64,
    count: u64,
}

fn grid_from(ctx: &Context, args: &SimulateArgs) -> Result<ExperimentGrid> {
    let mut grid = match &args.grid {
        Some(path) => {
            let mut g: ExperimentGrid =
                serde_json::from_str(&read_text(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            if g.trials == 0 {
                g.trials = ctx.trials;
            }
            g
        }
        None => ExperimentGrid {
            n: args.n.clone(),
            m: args.m.clone(),
            p: args.p.iter().map(|s| s.parse::<Prob>()).collect::<Result<_>>()?,
            eps: args.eps.clone(),
            trials: ctx.trials,
            seed: ctx.seed,
        },
    };
    if let Some(t) = ctx.trials_flag {
        grid.trials = t;
    }
    if let Some(s) = ctx.seed_flag {
        grid.seed = s;
    }
    if grid.trials == 0 {
        return Err(Error::Parse("trials must be positive".into()));
    }
    Ok(grid)
}

pub fn run(ctx: &Context, args: &SimulateArgs) -> Result<Exit> {
    let grid = grid_from(ctx, args)?;
    let rows: Vec<GridRow> = run_grid(&grid, &ctx.cfg.audit, ctx.cfg.confidence)?;
    let failures: u64 = rows.iter().map(|r| r.implication_failures).sum();
    let csv = to_csv(&rows, &TAIL_HEADER)?;
    let mut hist = Vec::new();
    if args.histogram {
        let mut done = Vec::new();
        for &n in &grid.n {
            for p in &grid.p {
                if done.contains(&(n, p.value().to_bits())) {
                    continue;
                }
                done.push((n, p.value().to_bits()));
                for (deficiency, count) in deficiency_histogram(n, p, grid.trials, grid.seed)? {
                    hist.push(HistRow { n, p: p.value(), deficiency, count });
                }
            }
        }
    }
    let json = to_json(&json!({ "rows": rows, "implication_failures": failures }))?;
    let mut out = ctx.out.borrow_mut();
    out.file("tail.csv", &csv)?;
    out.file("tail.json", &json)?;
    if args.histogram {
        out.file("histogram.csv", &to_csv(&hist, &["n", "p", "deficiency", "count"])?)?;
    }
    match ctx.format {
        Format::Csv => out.stdout(&csv)?,
        Format::Json => out.stdout(&json)?,
    }
    let params = json!({ "grid": grid, "histogram": args.histogram, "confidence": ctx.cfg.confidence });
    out.finish(RunManifest::new("simulate", params, Some(grid.seed), &ctx.cfg))?;
    if failures > 0 {
        eprintln!("{failures} trials had an empty initial block but deficiency below m");
        return Ok(Exit::Violation);
    }
    Ok(Exit::Clean)
}
