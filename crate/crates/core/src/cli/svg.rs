//! A dependency-free SVG of simulated tails against the main bound.

use std::fmt::Write;

use serde::Deserialize;

use crate::audit::{bound_main, AuditConfig};

/// The columns of `tail.csv` the plot needs.
#[derive(Clone, Debug, Deserialize)]
pub struct PlotRow {
    pub n: u64,
    pub m: u64,
    pub p: f64,
    pub eps: f64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bound: f64,
}

const W: f64 = 720.0;
const H: f64 = 440.0;
const PAD: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Log-scale plot: one bound curve per `(n, m, eps)`, simulated points with
/// Clopper–Pearson whiskers.
pub fn tail_plot(rows: &[PlotRow], cfg: &AuditConfig) -> String {
    let mut groups: Vec<(u64, u64, f64)> = Vec::new();
    for r in rows {
        if !groups.contains(&(r.n, r.m, r.eps)) {
            groups.push((r.n, r.m, r.eps));
        }
    }
    let (mut p_lo, mut p_hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.p), b.max(r.p)));
    if !p_lo.is_finite() {
        (p_lo, p_hi) = (0.0, 0.5);
    }
    if p_hi - p_lo < 1e-9 {
        p_lo = (p_lo - 0.05).max(0.0);
        p_hi += 0.05;
    }
    let curve = |m: u64, eps: f64, p: f64| bound_main(m, p, eps, cfg).log_value.log10();
    let mut y_lo = 0.0f64;
    let steps = 100;
    for &(_, m, eps) in &groups {
        for i in 0..=steps {
            let p = p_lo + (p_hi - p_lo) * i as f64 / steps as f64;
            y_lo = y_lo.min(curve(m, eps, p));
        }
    }
    for r in rows {
        for v in [r.p_hat, r.ci_low] {
            if v > 0.0 {
                y_lo = y_lo.min(v.log10());
            }
        }
    }
    let y_lo = y_lo.max(-300.0).floor() - 1.0;
    let sx = |p: f64| PAD + (p - p_lo) / (p_hi - p_lo) * (W - 2.0 * PAD);
    let sy = |l: f64| PAD + (0.0 - l.clamp(y_lo, 0.0)) / (0.0 - y_lo) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#, W - 2.0 * PAD, H - 2.0 * PAD);
    let tick = ((-y_lo) / 8.0).ceil().max(1.0);
    let mut l = 0.0;
    while l >= y_lo {
        let y = sy(l);
        let _ = writeln!(s, r##"<line x1="{PAD}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##, W - PAD);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{l}</text>"#, PAD - 4.0, y + 4.0);
        l -= tick;
    }
    for i in 0..=4 {
        let p = p_lo + (p_hi - p_lo) * i as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{p:.3}</text>"#, sx(p), H - PAD + 16.0);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">p</text>"#, W / 2.0, H - 14.0);
    for (gi, &(n, m, eps)) in groups.iter().enumerate() {
        let color = COLORS[gi % COLORS.len()];
        let pts: Vec<String> = (0..=steps)
            .map(|i| {
                let p = p_lo + (p_hi - p_lo) * i as f64 / steps as f64;
                format!("{:.1},{:.1}", sx(p), sy(curve(m, eps, p)))
            })
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        for r in rows.iter().filter(|r| (r.n, r.m, r.eps) == (n, m, eps)) {
            let x = sx(r.p);
            let lo = if r.ci_low > 0.0 { r.ci_low.log10() } else { y_lo };
            let hi = if r.ci_high > 0.0 { r.ci_high.log10() } else { y_lo };
            let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="{color}"/>"#, sy(lo), sy(hi));
            if r.p_hat > 0.0 {
                let _ = writeln!(s, r#"<circle cx="{x:.1}" cy="{:.1}" r="3" fill="{color}"/>"#, sy(r.p_hat.log10()));
            }
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" fill="{color}">n={n} m={m} eps={eps}</text>"#,
            PAD + 8.0,
            PAD + 14.0 + 14.0 * gi as f64
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_is_well_formed() {
        let rows = vec![
            PlotRow { n: 100, m: 10, p: 0.1, eps: 0.25, p_hat: 0.3, ci_low: 0.2, ci_high: 0.4, bound: 1.0 },
            PlotRow { n: 100, m: 10, p: 0.2, eps: 0.25, p_hat: 0.0, ci_low: 0.0, ci_high: 0.01, bound: 1.0 },
        ];
        let svg = tail_plot(&rows, &AuditConfig::default());
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(!tail_plot(&[], &AuditConfig::default()).contains("NaN"));
    }
}
