use serde::{Deserialize, Serialize};
use serde_json::json;

use super::config::RunManifest;
use super::io::{read_text, to_csv, to_json};
use super::svg::{tail_plot, PlotRow};
use super::{AuditArgs, Context, Exit, Format};
use crate::audit::{
    bound_few, bound_main, bound_many, decomposition_audit, elementary_inequalities, l_series, smallest_c_many,
    union_term_many, union_term_regular, BoundReport,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MainCell {
    pub m: u64,
    pub p: f64,
    pub eps: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManyCell {
    pub d: u64,
    pub t: f64,
    pub eps: f64,
    pub p: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FewCell {
    #[serde(rename = "M")]
    pub big_m: u64,
    pub d: u64,
    pub p: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnionManyCell {
    pub d: f64,
    pub t: f64,
    pub eps: f64,
    #[serde(default = "half")]
    pub p: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnionRegularCell {
    pub x: f64,
    pub y: f64,
    pub d: f64,
    pub kappa: f64,
    #[serde(default = "half")]
    pub p: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionCell {
    pub n: u64,
    pub m: u64,
    pub p: f64,
    pub eps: f64,
}

fn half() -> f64 {
    0.5
}

/// Cells to evaluate, grouped by kind. Every list may be empty.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditGrid {
    pub main: Vec<MainCell>,
    pub many: Vec<ManyCell>,
    pub few: Vec<FewCell>,
    pub union_many: Vec<UnionManyCell>,
    pub union_regular: Vec<UnionRegularCell>,
    pub decomposition: Vec<DecompositionCell>,
}

#[derive(Serialize)]
struct CsvRow {
    kind: String,
    id: String,
    inputs: String,
    log10_value: Option<f64>,
    value: String,
    hypotheses_hold: bool,
    status: String,
}

fn render_inputs(r: &BoundReport) -> String {
    r.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

fn bound_row(kind: &str, r: &BoundReport) -> CsvRow {
    CsvRow {
        kind: kind.into(),
        id: r.id.clone(),
        inputs: render_inputs(r),
        log10_value: Some(r.log_value.log10()),
        value: r.log_value.to_scientific(),
        hypotheses_hold: r.hypotheses_hold,
        status: if r.hypotheses_hold { "ok".into() } else { "hypotheses_fail".into() },
    }
}

fn tri(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "yes",
        Some(false) => "no",
        None => "empty_range",
    }
}

pub fn run(ctx: &Context, args: &AuditArgs) -> Result<Exit> {
    let cfg = &ctx.cfg.audit;
    let grid: AuditGrid = match &args.grid {
        Some(p) => serde_json::from_str(&read_text(p)?).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?,
        None => AuditGrid::default(),
    };
    let mut rows = Vec::new();
    let series = l_series();
    let series_rel = (series.direct - series.closed_form).abs() / series.closed_form;
    let series_ok = series_rel < 1e-9;
    rows.push(CsvRow {
        kind: "series".into(),
        id: "l_series".into(),
        inputs: format!("terms={}", series.terms),
        log10_value: Some(series.closed_form.log10()),
        value: format!("{}", series.closed_form),
        hypotheses_hold: true,
        status: format!("relative_gap={series_rel:e};ceiling={}", series.ceiling),
    });
    let ineq = elementary_inequalities(args.inequality_points, 16);
    for c in &ineq {
        rows.push(CsvRow {
            kind: "inequality".into(),
            id: c.id.into(),
            inputs: format!("points={}", c.points),
            log10_value: None,
            value: format!("{:e}", c.worst_margin),
            hypotheses_hold: true,
            status: if c.holds { "holds".into() } else { format!("fails_at_p={}", c.worst_at.0) },
        });
    }
    let main: Vec<BoundReport> = grid.main.iter().map(|c| bound_main(c.m, c.p, c.eps, cfg)).collect();
    let many: Vec<BoundReport> = grid.many.iter().map(|c| bound_many(c.d, c.t, c.eps, c.p, cfg)).collect();
    let few: Vec<BoundReport> = grid.few.iter().map(|c| bound_few(c.big_m, c.d, c.p, cfg)).collect();
    for (kind, list) in [("main", &main), ("many", &many), ("few", &few)] {
        rows.extend(list.iter().map(|r| bound_row(kind, r)));
    }
    let mut union_many = Vec::new();
    for c in &grid.union_many {
        let r = union_term_many(c.d, c.t, c.eps, c.p, cfg.l, cfg, args.points);
        let smallest = smallest_c_many(c.d, c.t, c.eps, cfg.l, args.points);
        rows.push(CsvRow {
            kind: "union".into(),
            id: r.id.clone(),
            inputs: format!("d={};t={};eps={};p={}", c.d, c.t, c.eps, c.p),
            log10_value: Some(r.log_value.log10()),
            value: r.log_value.to_scientific(),
            hypotheses_hold: r.hypotheses_hold,
            status: format!(
                "monotone={};leq_one={};smallest_c={}",
                tri(r.monotone_on_grid),
                tri(r.leq_one_on_grid),
                smallest.map(|v| format!("{v:.4}")).unwrap_or_else(|| "none".into())
            ),
        });
        union_many.push(json!({ "cell": c, "report": r, "smallest_c": smallest }));
    }
    let mut union_regular = Vec::new();
    for c in &grid.union_regular {
        let r = union_term_regular(c.x, c.y, c.d, c.kappa, c.p, cfg.l, cfg, args.points);
        rows.push(CsvRow {
            kind: "union".into(),
            id: r.id.clone(),
            inputs: format!("x={};y={};d={};kappa={};p={}", c.x, c.y, c.d, c.kappa, c.p),
            log10_value: Some(r.log_value.log10()),
            value: r.log_value.to_scientific(),
            hypotheses_hold: r.hypotheses_hold,
            status: format!("monotone={};leq_one={}", tri(r.monotone_on_grid), tri(r.leq_one_on_grid)),
        });
        union_regular.push(json!({ "cell": c, "report": r }));
    }
    let mut decomposition = Vec::new();
    for c in &grid.decomposition {
        let r = decomposition_audit(c.n, c.m, c.p, c.eps, cfg);
        let mut row = bound_row("decomposition", &r.report);
        row.status = format!("chain_holds={};dominant={};split={}", r.chain_holds, r.dominant, r.split);
        rows.push(row);
        decomposition.push(r);
    }

    let reports = json!({
        "config": cfg,
        "l_series": series,
        "inequalities": ineq,
        "main": main,
        "many": many,
        "few": few,
        "union_many": union_many,
        "union_regular": union_regular,
        "decomposition": decomposition,
    });
    let reports_text = to_json(&reports)?;
    let csv = to_csv(&rows, &["kind", "id", "inputs", "log10_value", "value", "hypotheses_hold", "status"])?;
    let mut out = ctx.out.borrow_mut();
    out.file("reports.json", &reports_text)?;
    out.file("audit.csv", &csv)?;
    if let Some(path) = &args.simulated {
        let text = read_text(path)?;
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let sim: Vec<PlotRow> = rdr
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        out.file("tail_vs_bound.svg", tail_plot(&sim, cfg).as_bytes())?;
    }
    match ctx.format {
        Format::Csv => out.stdout(&csv)?,
        Format::Json => out.stdout(&reports_text)?,
    }
    let params = json!({
        "grid": grid,
        "simulated": args.simulated.as_ref().map(|p| p.display().to_string()),
        "points": args.points,
        "inequality_points": args.inequality_points,
    });
    out.finish(RunManifest::new("audit", params, None, &ctx.cfg))?;
    let clean = series_ok && ineq.iter().all(|c| c.holds);
    if !clean {
        for c in ineq.iter().filter(|c| !c.holds) {
            eprintln!("inequality {} fails (margin {:e} at p = {})", c.id, c.worst_margin, c.worst_at.0);
        }
        if !series_ok {
            eprintln!("series and closed form disagree (relative gap {series_rel:e})");
        }
        return Ok(Exit::Violation);
    }
    Ok(Exit::Clean)
}
