//! Closed-form bounds, union-bound terms and elementary inequalities,
//! evaluated in log space.
//!
//! Every report carries a hypothesis flag computed from the inputs and the
//! [`AuditConfig`] constants, so a value is never read outside the region
//! where the corresponding statement applies.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::ser::Serializer;
use serde::Serialize;

/// Natural logarithm of a nonnegative quantity. `-inf` encodes zero.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogValue(pub f64);

impl LogValue {
    pub const ONE: LogValue = LogValue(0.0);

    pub fn ln(self) -> f64 {
        self.0
    }

    /// The value as a double; underflows to zero below about `e^-745`.
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn log10(self) -> f64 {
        self.0 / std::f64::consts::LN_10
    }

    pub fn leq_one(self) -> bool {
        self.0 <= 0.0
    }

    /// `ln(e^a + e^b)`.
    pub fn add(self, other: LogValue) -> LogValue {
        let (hi, lo) = if self.0 >= other.0 { (self.0, other.0) } else { (other.0, self.0) };
        if hi == f64::NEG_INFINITY {
            return self;
        }
        LogValue(hi + (lo - hi).exp().ln_1p())
    }

    /// Scientific notation that survives underflow, e.g. `3.1416e-434294`.
    pub fn to_scientific(self) -> String {
        if self.0 == f64::NEG_INFINITY {
            return "0".into();
        }
        let l = self.log10();
        let e = l.floor();
        let mantissa = 10f64.powf(l - e);
        format!("{mantissa:.15}e{}", e as i64)
    }

    pub fn from_scientific(text: &str) -> Option<LogValue> {
        if text.trim() == "0" {
            return Some(LogValue(f64::NEG_INFINITY));
        }
        let (m, e) = text.trim().split_once(['e', 'E'])?;
        let m: f64 = m.parse().ok()?;
        let e: i64 = e.parse().ok()?;
        if m <= 0.0 {
            return None;
        }
        Some(LogValue(m.ln() + e as f64 * std::f64::consts::LN_10))
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_scientific())
    }
}

impl Serialize for LogValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else if self.0 < 0.0 {
            s.serialize_str("-inf")
        } else {
            s.serialize_str(if self.0.is_nan() { "nan" } else { "inf" })
        }
    }
}

/// `k ln(1 - p)` with the convention `0 * ln 0 = 0`.
fn pow_one_minus(p: f64, k: f64) -> LogValue {
    if k == 0.0 {
        return LogValue::ONE;
    }
    LogValue(k * (-p).ln_1p())
}

/// Audit constants. `l` defaults to [`l_default`]; `c` and `k0` are desk
/// choices for constants that are only known to exist.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditConfig {
    pub c: f64,
    pub l: f64,
    pub k0: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig { c: 16.0, l: l_default(), k0: 8192.0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub id: String,
    pub inputs: BTreeMap<String, f64>,
    pub log_value: LogValue,
    pub hypotheses_hold: bool,
    pub details: Vec<String>,
}

impl BoundReport {
    fn new(id: &str, inputs: &[(&str, f64)], log_value: LogValue) -> Self {
        BoundReport {
            id: id.into(),
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            log_value,
            hypotheses_hold: true,
            details: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, what: String) {
        if !ok {
            self.hypotheses_hold = false;
        }
        self.details.push(format!("{} {what}", if ok { "ok" } else { "fails" }));
    }

    pub fn value(&self) -> f64 {
        self.log_value.value()
    }
}

/// Lower end of the `p` range in the main theorem.
pub fn main_threshold(m: f64, eps: f64, c: f64) -> f64 {
    c * (1.0 / eps).log2() / (eps.powi(3) * m).sqrt()
}

/// `(1 - p)^(m/2 - εm)`.
pub fn bound_main(m: u64, p: f64, eps: f64, cfg: &AuditConfig) -> BoundReport {
    let mf = m as f64;
    let lv = pow_one_minus(p, mf / 2.0 - eps * mf);
    let mut r = BoundReport::new("bound_main", &[("m", mf), ("p", p), ("eps", eps)], lv);
    let lo = main_threshold(mf, eps, cfg.c);
    r.require(eps > 0.0, format!("eps = {eps} > 0"));
    r.require(lo <= p, format!("C log(1/eps)/sqrt(eps^3 m) = {lo:.6} <= p"));
    r.require(p <= 0.5, format!("p = {p} <= 1/2"));
    r
}

/// Lower end of the `p` range for many missing sums from an interval of length `Td`.
pub fn many_threshold(d: f64, t: f64, eps: f64, c: f64) -> f64 {
    c * t * (t / eps).log2() / (eps.powi(3) * d).sqrt()
}

/// `(1 - p)^(d/2 - 2εd)`.
pub fn bound_many(d: u64, t: f64, eps: f64, p: f64, cfg: &AuditConfig) -> BoundReport {
    let df = d as f64;
    let lv = pow_one_minus(p, df / 2.0 - 2.0 * eps * df);
    let mut r = BoundReport::new("bound_many", &[("d", df), ("T", t), ("eps", eps), ("p", p)], lv);
    let lo = many_threshold(df, t, eps, cfg.c);
    r.require(t >= 1.5, format!("T = {t} >= 3/2"));
    r.require(eps > 0.0, format!("eps = {eps} > 0"));
    r.require(lo <= p, format!("C T log(T/eps)/sqrt(eps^3 d) = {lo:.6} <= p"));
    r.require(p <= 0.5, format!("p = {p} <= 1/2"));
    r
}

/// `(1 - p)^(M / 2^11)` for missing at least `d` sums from the middle window.
pub fn bound_few(big_m: u64, d: u64, p: f64, cfg: &AuditConfig) -> BoundReport {
    let mf = big_m as f64;
    let df = d as f64;
    let lv = pow_one_minus(p, mf / 2048.0);
    let mut r = BoundReport::new("bound_few", &[("M", mf), ("d", df), ("p", p)], lv);
    let k = mf / df;
    let ld = df.log2();
    r.require(k >= cfg.k0, format!("K = M/d = {k} >= K0 = {}", cfg.k0));
    r.require(df / ld.powi(3) >= 256.0 * k, format!("d/log^3 d = {:.4} >= 2^8 K", df / ld.powi(3)));
    let lo = (k * k.log2() / mf.sqrt()).max(k * k * ld * ld / df);
    r.require(lo <= p, format!("max(K log K/sqrt M, K^2 log^2 d/d) = {lo:.6} <= p"));
    r.require(p <= 0.5, format!("p = {p} <= 1/2"));
    r
}

/// A union-bound term scanned over its hypothesis range of `p`.
#[derive(Clone, Debug, Serialize)]
pub struct UnionTermReport {
    pub id: String,
    pub log_value: LogValue,
    pub leq_one: bool,
    /// `p` lies in `[p_lo, 1/2]`.
    pub hypotheses_hold: bool,
    pub p_lo: f64,
    /// `None` when the range is empty.
    pub monotone_on_grid: Option<bool>,
    /// Every grid value is at most one; `None` when the range is empty.
    pub leq_one_on_grid: Option<bool>,
    pub grid: Vec<(f64, f64)>,
}

fn scan<F: Fn(f64) -> f64>(p_lo: f64, points: usize, f: &F) -> Vec<(f64, f64)> {
    if !(p_lo <= 0.5) || points == 0 {
        return Vec::new();
    }
    if points == 1 {
        return vec![(p_lo, f(p_lo))];
    }
    (0..points)
        .map(|i| {
            let p = p_lo + (0.5 - p_lo) * i as f64 / (points - 1) as f64;
            (p, f(p))
        })
        .collect()
}

fn union_report<F: Fn(f64) -> f64>(id: &str, p: f64, p_lo: f64, points: usize, f: F) -> UnionTermReport {
    let grid = scan(p_lo, points, &f);
    let (mono, leq) = if grid.is_empty() {
        (None, None)
    } else {
        (
            Some(grid.windows(2).all(|w| w[1].1 <= w[0].1)),
            Some(grid.iter().all(|&(_, v)| v <= 0.0)),
        )
    };
    let lv = LogValue(f(p));
    UnionTermReport {
        id: id.into(),
        log_value: lv,
        leq_one: lv.leq_one(),
        hypotheses_hold: p_lo <= p && p <= 0.5,
        p_lo,
        monotone_on_grid: mono,
        leq_one_on_grid: leq,
        grid,
    }
}

/// `k ln(e N p / k) + e_q ln(1 - p)`, the shape shared by both union terms.
fn union_ln(k: f64, n: f64, q: f64, p: f64) -> f64 {
    k * (std::f64::consts::E * n * p / k).ln() + pow_one_minus(p, q).ln()
}

/// `(eTdp/k)^k (1 - p)^(εd/2)` with `k = LT sqrt(d/ε)`.
pub fn union_term_many(d: f64, t: f64, eps: f64, p: f64, l: f64, cfg: &AuditConfig, points: usize) -> UnionTermReport {
    let k = l * t * (d / eps).sqrt();
    let f = |p: f64| union_ln(k, t * d, eps * d / 2.0, p);
    union_report("union_term_many", p, many_threshold(d, t, eps, cfg.c), points, f)
}

/// `(e|X|p/k)^k (1 - p)^(9κ|X|/1600)` with `k = L log(|Y|/d) sqrt|X|`.
pub fn union_term_regular(size_x: f64, size_y: f64, d: f64, kappa: f64, p: f64, l: f64, cfg: &AuditConfig, points: usize) -> UnionTermReport {
    let lg = (size_y / d).log2();
    let k = l * lg * size_x.sqrt();
    let f = |p: f64| union_ln(k, size_x, 9.0 * kappa * size_x / 1600.0, p);
    union_report("union_term_regular", p, cfg.c * lg / size_x.sqrt(), points, f)
}

/// Smallest `C` (to relative precision `1e-9`) for which the many-missing
/// union term is at most one and non-increasing on `[C T log(T/ε)/sqrt(ε^3 d), 1/2]`.
/// `None` if no `C` leaving a nonempty range works.
pub fn smallest_c_many(d: f64, t: f64, eps: f64, l: f64, points: usize) -> Option<f64> {
    let unit = many_threshold(d, t, eps, 1.0);
    let c_max = 0.5 / unit;
    let ok = |c: f64| {
        let cfg = AuditConfig { c, l, k0: 1.0 };
        let r = union_term_many(d, t, eps, 0.5, l, &cfg, points);
        r.monotone_on_grid == Some(true) && r.leq_one_on_grid == Some(true)
    };
    if !(c_max > 0.0) || !ok(c_max) {
        return None;
    }
    let (mut lo, mut hi) = (0.0, c_max);
    while hi - lo > 1e-9 * c_max {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// The series value, its closed form and the ceiling used as the default `L`.
#[derive(Clone, Debug, Serialize)]
pub struct LSeries {
    pub direct: f64,
    pub closed_form: f64,
    pub terms: u64,
    pub tail_bound: f64,
    pub ceiling: u64,
}

/// `8 Σ_{k>=1} r^k` with `r = sqrt(1 - 2^-11)`, summed until the tail is below `1e-9`.
pub fn l_series() -> LSeries {
    let r = (1.0 - 2f64.powi(-11)).sqrt();
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    let mut term = 8.0 * r;
    let mut terms = 0u64;
    loop {
        // compensated summation
        let y = term - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        terms += 1;
        term *= r;
        let tail = term / (1.0 - r);
        if tail < 1e-9 {
            let closed = 8.0 * r / (1.0 - r);
            return LSeries { direct: sum, closed_form: closed, terms, tail_bound: tail, ceiling: closed.ceil() as u64 };
        }
    }
}

pub fn l_default() -> f64 {
    l_series().ceiling as f64
}

/// Result of the final chain `(1-p)^m + m(1-p)^(m/2 - εm/2) <= (1-p)^(m/2 - εm)`.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub report: BoundReport,
    pub lhs: LogValue,
    pub rhs: LogValue,
    pub middle: LogValue,
    pub end_pairs: LogValue,
    pub chain_holds: bool,
    /// `"middle"` or `"end_pairs"`, whichever summand is larger.
    pub dominant: &'static str,
    /// `M = (2^11 + K0/2) m < n`, so the window is split into ends and middle.
    pub split: bool,
}

pub fn decomposition_audit(n: u64, m: u64, p: f64, eps: f64, cfg: &AuditConfig) -> DecompositionReport {
    let mf = m as f64;
    let middle = pow_one_minus(p, mf);
    let end_pairs = LogValue(mf.ln() + pow_one_minus(p, mf / 2.0 - eps * mf / 2.0).ln());
    let lhs = middle.add(end_pairs);
    let rhs = pow_one_minus(p, mf / 2.0 - eps * mf);
    let mut report = BoundReport::new("decomposition", &[("n", n as f64), ("m", mf), ("p", p), ("eps", eps)], rhs);
    let lo = main_threshold(mf, eps, cfg.c);
    report.require(eps > 0.0, format!("eps = {eps} > 0"));
    report.require(lo <= p, format!("C log(1/eps)/sqrt(eps^3 m) = {lo:.6} <= p"));
    report.require(p <= 0.5, format!("p = {p} <= 1/2"));
    let split = (2048.0 + cfg.k0 / 2.0) * mf < n as f64;
    DecompositionReport {
        report,
        lhs,
        rhs,
        middle,
        end_pairs,
        chain_holds: lhs <= rhs,
        dominant: if middle >= end_pairs { "middle" } else { "end_pairs" },
        split,
    }
}

/// Product bound for one end split `d1 + d2`: `Π (1-p)^(d_i/2 - εm/8)`.
pub fn end_pair_bound(d1: u64, d2: u64, m: u64, p: f64, eps: f64) -> LogValue {
    let slack = eps * m as f64 / 8.0;
    let e = (d1 as f64 / 2.0 - slack) + (d2 as f64 / 2.0 - slack);
    pow_one_minus(p, e)
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityCheck {
    pub id: &'static str,
    pub worst_margin: f64,
    /// Grid point `(p, aux)` attaining the worst margin.
    pub worst_at: (f64, f64),
    pub points: usize,
    pub holds: bool,
}

type Margin = fn(f64, f64) -> f64;

/// `(1-p)^(p/2) - (1 - p^2)` on `[0, 1]`.
fn m_square(p: f64, _: f64) -> f64 {
    (0.5 * p * (-p).ln_1p()).exp_m1() + p * p
}

/// `1 - (1-p)^(p/4) - p^2/4` on `[0, 1]`.
fn m_quarter(p: f64, _: f64) -> f64 {
    -(0.25 * p * (-p).ln_1p()).exp_m1() - 0.25 * p * p
}

/// `-0.94 - ln(100^(1/100) e^(-99/100))`, constant in `p`.
fn m_chernoff_const(_: f64, _: f64) -> f64 {
    -0.94 - (100f64.ln() / 100.0 - 0.99)
}

/// `ln(1-p) + 0.94 s p` per unit `d`, `s = |X|/d >= 3/2`, `p <= 1/2`.
fn m_chernoff_tail(p: f64, s: f64) -> f64 {
    (-p).ln_1p() + 0.94 * s * p
}

/// `ln(1-p)/16 + p/8` per unit `|X|`, `p <= 1/2`.
fn m_chernoff_half(p: f64, _: f64) -> f64 {
    (-p).ln_1p() / 16.0 + p / 8.0
}

/// Each inequality with its `p` range and auxiliary range.
const INEQUALITIES: [(&str, Margin, f64, (f64, f64)); 5] = [
    ("one_minus_p_squared", m_square, 1.0, (0.0, 0.0)),
    ("quarter_power_gap", m_quarter, 1.0, (0.0, 0.0)),
    ("chernoff_hundredth_constant", m_chernoff_const, 0.5, (0.0, 0.0)),
    ("chernoff_hundredth_tail", m_chernoff_tail, 0.5, (1.5, 64.0)),
    ("chernoff_half_tail", m_chernoff_half, 0.5, (0.0, 0.0)),
];

/// Checks every inequality on `p_points` evenly spaced points of its `p`
/// range (endpoints included) times `aux_points` points of its auxiliary range.
pub fn elementary_inequalities(p_points: usize, aux_points: usize) -> Vec<InequalityCheck> {
    let p_points = p_points.max(2);
    INEQUALITIES
        .iter()
        .map(|&(id, margin, p_hi, (a_lo, a_hi))| {
            let aux_n = if a_lo == a_hi { 1 } else { aux_points.max(2) };
            let total = p_points * aux_n;
            let worst = (0..total)
                .into_par_iter()
                .map(|k| {
                    let p = p_hi * (k / aux_n) as f64 / (p_points - 1) as f64;
                    let a = if aux_n == 1 { a_lo } else { a_lo + (a_hi - a_lo) * (k % aux_n) as f64 / (aux_n - 1) as f64 };
                    (margin(p, a), k)
                })
                .reduce(|| (f64::INFINITY, usize::MAX), |x, y| if (y.0, y.1) < (x.0, x.1) { y } else { x });
            let k = worst.1;
            let p = p_hi * (k / aux_n) as f64 / (p_points - 1) as f64;
            let a = if aux_n == 1 { a_lo } else { a_lo + (a_hi - a_lo) * (k % aux_n) as f64 / (aux_n - 1) as f64 };
            InequalityCheck { id, worst_margin: worst.0, worst_at: (p, a), points: total, holds: worst.0 >= 0.0 }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> AuditConfig {
        AuditConfig::default()
    }

    #[test]
    fn main_bound_values() {
        assert_eq!(bound_main(100, 0.3, 0.5, &cfg()).value(), 1.0);
        let r = bound_main(100, 0.1, 0.1, &cfg());
        assert!((r.value() - 0.9f64.powi(40)).abs() < 1e-15);
        assert!(!r.hypotheses_hold);
    }

    #[test]
    fn many_and_few_values() {
        assert_eq!(bound_many(500, 2.0, 0.25, 0.3, &cfg()).value(), 1.0);
        let r = bound_many(1000, 2.0, 0.05, 0.3, &cfg());
        assert!((r.log_value.ln() - 400.0 * 0.7f64.ln()).abs() < 1e-9);
        assert!((bound_few(2048, 1, 0.5, &cfg()).value() - 0.5).abs() < 1e-15);
        assert!(bound_few(2048, 1, 1e-12, &cfg()).value() > 1.0 - 1e-11);
    }

    #[test]
    fn series_two_ways() {
        let s = l_series();
        assert!(((s.direct - s.closed_form) / s.closed_form).abs() < 1e-6);
        assert!(s.tail_bound < 1e-9);
    }

    #[test]
    fn log_add_matches_direct() {
        let a = LogValue(0.3f64.ln());
        let b = LogValue(0.6f64.ln());
        assert!((a.add(b).value() - 0.9).abs() < 1e-15);
        let z = LogValue(f64::NEG_INFINITY);
        assert_eq!(z.add(a), a);
    }

    #[test]
    fn scientific_round_trip_far_below_underflow() {
        for ln in [-1e6, -123456.789, -745.5, -1.0, 0.0] {
            let v = LogValue(ln);
            let back = LogValue::from_scientific(&v.to_scientific()).unwrap();
            let err = if ln == 0.0 { back.ln().abs() } else { ((back.ln() - ln) / ln).abs() };
            assert!(err < 1e-12, "{ln} -> {}", v.to_scientific());
        }
    }

    #[test]
    fn decomposition_symmetric_ends() {
        assert_eq!(end_pair_bound(30, 50, 100, 0.2, 0.1), end_pair_bound(50, 30, 100, 0.2, 0.1));
        // (1-p)^(εm/2) > 1/(2m): the end term alone beats the right side
        let r = decomposition_audit(10_000, 10, 0.002, 0.2, &cfg());
        assert!(!r.chain_holds && !r.report.hypotheses_hold);
    }

    #[test]
    fn inequalities_hold_at_boundaries() {
        assert_eq!(m_square(1.0, 0.0), 0.0);
        assert_eq!(m_square(0.0, 0.0), 0.0);
        assert_eq!(m_quarter(0.0, 0.0), 0.0);
        for c in elementary_inequalities(101, 11) {
            assert!(c.holds, "{c:?}");
        }
    }
}
