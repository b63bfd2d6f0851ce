//! Executable checks of the identities, inequalities and thresholds that
//! rule out collisions with `0 <= m < k < n/2`, `m <= 0.735k`.
//!
//! Every checker gates on its hypotheses: when one fails the verdict is
//! INDETERMINATE and the notes name the violated hypotheses.

use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{log_binomial_exact, log_factorial_exact, smooth_split, ArithError, Natural};
use crate::bounds::{
    compare, decide, dusart_pi_upper, large_l_thresholds, log_g_plus, BoundsError, Decision, Inequality,
    IntervalValue, Real, Relation, Section5Thresholds, VerdictKind,
};
use crate::collision::{check_eq12, ParamTuple};
use crate::sieve::primes_in;

/// Significant digits requested from the exact log-factorial oracle.
const ORACLE_DIGITS: u32 = 40;

#[derive(Debug, Error)]
pub enum LemmaError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("no sign change of the sum-threshold expression in [{lo}, {hi}]")]
    NoSignChange { lo: u64, hi: u64 },
    #[error("every grid point had a nonpositive denominator")]
    EmptyGrid,
    #[error("invalid argument: {0}")]
    Argument(String),
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

/// One decided comparison inside a report.
#[derive(Clone, Debug, Serialize)]
pub struct Part {
    pub name: String,
    pub lhs: IntervalValue,
    pub relation: &'static str,
    pub rhs: IntervalValue,
    /// `None` for comparisons reported for traceability only.
    pub verdict: Option<VerdictKind>,
    pub margin: f64,
}

impl Part {
    fn decided(name: &str, d: &Decision) -> Part {
        Part {
            name: name.into(),
            lhs: d.lhs,
            relation: d.relation.symbol(),
            rhs: d.rhs,
            verdict: Some(d.verdict.kind),
            margin: d.verdict.margin,
        }
    }

    fn informational(name: &str, d: &Decision) -> Part {
        Part { verdict: None, ..Part::decided(name, d) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub hypotheses: BTreeMap<String, bool>,
    pub lhs: IntervalValue,
    pub rhs: IntervalValue,
    pub verdict: VerdictKind,
    pub notes: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<Part>,
    #[serde(skip)]
    pub margin: f64,
}

impl LemmaReport {
    fn build(
        lemma: &str,
        hypotheses: &[(&str, bool)],
        lhs: IntervalValue,
        rhs: IntervalValue,
        raw: VerdictKind,
        margin: f64,
        mut notes: Vec<String>,
        parts: Vec<Part>,
    ) -> LemmaReport {
        let hypotheses: BTreeMap<String, bool> = hypotheses.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let violated: Vec<&str> = hypotheses.iter().filter(|(_, v)| !**v).map(|(k, _)| k.as_str()).collect();
        let verdict = if violated.is_empty() {
            raw
        } else {
            notes.insert(0, format!("hypotheses violated: {}", violated.join(", ")));
            VerdictKind::Indeterminate
        };
        notes.push(format!("margin={margin:.6e}"));
        LemmaReport { lemma: lemma.into(), hypotheses, lhs, rhs, verdict, notes: notes.join("; "), parts, margin }
    }

    pub fn holds(&self) -> bool {
        self.verdict == VerdictKind::Holds
    }
}

/// Combines part verdicts: any FAILS wins, then any INDETERMINATE.
fn combine(parts: &[Part]) -> VerdictKind {
    let decided: Vec<VerdictKind> = parts.iter().filter_map(|p| p.verdict).collect();
    if decided.contains(&VerdictKind::Fails) {
        VerdictKind::Fails
    } else if decided.contains(&VerdictKind::Indeterminate) {
        VerdictKind::Indeterminate
    } else {
        VerdictKind::Holds
    }
}

fn n_iv(v: i64) -> IntervalValue {
    IntervalValue::big_int(v as i128)
}

// ---------------------------------------------------------------------------
// product and ratio identities
// ---------------------------------------------------------------------------

/// Product of `f(i)` for `i` in `lo..=hi`; `None` if a factor is not positive.
fn product(lo: i64, hi: i64, f: impl Fn(i64) -> i64) -> Option<Natural> {
    let mut acc = Natural::one();
    for i in lo..=hi {
        let v = f(i);
        if v <= 0 {
            return None;
        }
        acc *= v as u64;
    }
    Some(acc)
}

fn identity_domain(t: &ParamTuple) -> bool {
    (t.delta == 0 || t.delta == 1) && 0 <= t.m && t.m < t.k && t.k < t.n && t.l >= t.delta
}

/// `prod_{i=m}^{k-1} (n-i) * prod_{i=delta+1}^{l} (2n+i) = prod_{i=m+delta+1}^{k+l} (n+i)`.
///
/// Equivalent to the binomial equation for every tuple in its domain.
pub fn product_identity_holds(t: &ParamTuple) -> bool {
    if !identity_domain(t) {
        return false;
    }
    let (n, m, k, l, d) = (t.n, t.m, t.k, t.l, t.delta);
    let lhs = product(m, k - 1, |i| n - i).zip(product(d + 1, l, |i| 2 * n + i)).map(|(a, b)| a * b);
    let rhs = product(m + d + 1, k + l, |i| n + i);
    lhs.is_some() && lhs == rhs
}

/// The same identity with the first product over `m+1 <= i <= k`, as printed.
pub fn printed_product_identity_holds(t: &ParamTuple) -> bool {
    if !identity_domain(t) {
        return false;
    }
    let (n, m, k, l, d) = (t.n, t.m, t.k, t.l, t.delta);
    let lhs = product(m + 1, k, |i| n - i).zip(product(d + 1, l, |i| 2 * n + i)).map(|(a, b)| a * b);
    let rhs = product(m + d + 1, k + l, |i| n + i);
    lhs.is_some() && lhs == rhs
}

/// `prod_{i=1}^{l-delta} (2n+delta+i)/(n+k+delta+i) = prod_{j=1}^{k-m} (n+delta+m+j)/(n-k+j+shift)`
/// cross-multiplied; `shift = 0` is the derived form, `shift = -1` the printed one.
fn ratio_identity(t: &ParamTuple, shift: i64) -> bool {
    if !identity_domain(t) {
        return false;
    }
    let (n, m, k, l, d) = (t.n, t.m, t.k, t.l, t.delta);
    let a = product(1, l - d, |i| 2 * n + d + i);
    let b = product(1, k - m, |j| n - k + j + shift);
    let c = product(1, k - m, |j| n + d + m + j);
    let e = product(1, l - d, |i| n + k + d + i);
    match (a, b, c, e) {
        (Some(a), Some(b), Some(c), Some(e)) => a * b == c * e,
        _ => false,
    }
}

pub fn ratio_identity_holds(t: &ParamTuple) -> bool {
    ratio_identity(t, 0)
}

pub fn printed_ratio_identity_holds(t: &ParamTuple) -> bool {
    ratio_identity(t, -1)
}

// ---------------------------------------------------------------------------
// log-ratio bounds
// ---------------------------------------------------------------------------

struct RatioUpper(ParamTuple);

impl Inequality for RatioUpper {
    fn relation(&self) -> Relation {
        Relation::Lt
    }
    fn sides<R: Real>(&self) -> (R, R) {
        let t = &self.0;
        let i = |v: i64| R::int(v);
        let lhs = i(t.l - t.delta) * (i(2 * t.n + t.l) / i(t.n + t.k + t.l)).ln();
        let rhs = i((t.k - t.m) * (t.k + t.m + t.delta + 1)) / i(t.n - t.k);
        (lhs, rhs)
    }
}

/// `plus = 0` is the derived lower bound, `plus = 1` the printed one.
struct RatioLower(ParamTuple, i64);

impl Inequality for RatioLower {
    fn relation(&self) -> Relation {
        Relation::Gt
    }
    fn sides<R: Real>(&self) -> (R, R) {
        let t = &self.0;
        let i = |v: i64| R::int(v);
        let lhs = i(t.l - t.delta) * (i(2 * t.n) / i(t.n + t.k)).ln();
        let rhs = i((t.k - t.m) * (t.k + t.m + t.delta + self.1)) / i(t.n + t.k + t.delta);
        (lhs, rhs)
    }
}

/// Upper and lower bounds for `(l - delta) log(...)` forced by a collision.
pub fn check_log_ratio_bounds(t: &ParamTuple) -> LemmaReport {
    let f = t.flags();
    let hyps = [("binomial_equation", check_eq12(t)), ("ordered", f.ordered), ("l_above_delta", f.l_above_delta)];
    let upper = decide(&RatioUpper(*t));
    let lower = decide(&RatioLower(*t, 0));
    let printed = decide(&RatioLower(*t, 1));
    let parts = vec![
        Part::decided("upper", &upper),
        Part::decided("lower", &lower),
        Part::informational("lower_as_printed", &printed),
    ];
    let margin = upper.verdict.margin.min(lower.verdict.margin);
    LemmaReport::build(
        "log_ratio_bounds",
        &hyps,
        upper.lhs,
        upper.rhs,
        combine(&parts),
        margin,
        vec!["lhs/rhs are the upper bound; the lower bound uses (k+m+delta)".into()],
        parts,
    )
}

// ---------------------------------------------------------------------------
// small-k forcing
// ---------------------------------------------------------------------------

/// `k^2 / ((n-k) log(2.001/(1.001 + k/n))) < 1`.
struct ForcingQuantity {
    n: u64,
    k: u64,
}

impl<'a> ForcingQuantity {
    fn quantity<R: Real>(&'a self) -> R {
        let n = R::big_int(self.n as i128);
        let k = R::big_int(self.k as i128);
        let log = (R::decimal("2.001") / (R::decimal("1.001") + k.clone() / n.clone())).ln();
        k.sq() / ((n - k) * log)
    }
}

impl Inequality for ForcingQuantity {
    fn relation(&self) -> Relation {
        Relation::Lt
    }
    fn sides<R: Real>(&self) -> (R, R) {
        (self.quantity(), R::int(1))
    }
}

/// HOLDS when `k` is small enough that the upper log-ratio bound forces
/// `l = delta`.
pub fn check_small_k_forcing(n: u64, k: u64) -> LemmaReport {
    let d = decide(&ForcingQuantity { n, k });
    LemmaReport::build(
        "small_k_forcing",
        &[("n_large", n >= 500_000), ("k_positive", k >= 1 && k < n)],
        d.lhs,
        d.rhs,
        d.verdict.kind,
        d.verdict.margin,
        vec![],
        vec![],
    )
}

/// `588 <= k < 0.00151 n`.
pub fn k_in_forced_range(t: &ParamTuple) -> bool {
    588 <= t.k && 100_000 * t.k < 151 * t.n
}

/// `l < 0.00271 k`.
pub fn l_in_forced_range(t: &ParamTuple) -> bool {
    100_000 * t.l < 271 * t.k
}

// ---------------------------------------------------------------------------
// window smoothness
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    /// `n - i`
    Below,
    /// `n + i`
    Above,
}

/// `{n - i}` or `{n + i}` for `i` in `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IndexWindow {
    pub side: Side,
    pub lo: i64,
    pub hi: i64,
}

impl IndexWindow {
    pub fn elements(&self, n: i64) -> Vec<i64> {
        (self.lo..=self.hi)
            .map(|i| match self.side {
                Side::Below => n - i,
                Side::Above => n + i,
            })
            .collect()
    }

    /// `{n - i : m <= i <= k-1}`, the window matching the exact identity.
    pub fn below(t: &ParamTuple) -> IndexWindow {
        IndexWindow { side: Side::Below, lo: t.m, hi: t.k - 1 }
    }

    /// `{n - i : m+1 <= i <= k}`, as printed.
    pub fn below_printed(t: &ParamTuple) -> IndexWindow {
        IndexWindow { side: Side::Below, lo: t.m + 1, hi: t.k }
    }

    /// `{n + i : m0+1 <= i <= k+l}`.
    pub fn above(t: &ParamTuple) -> IndexWindow {
        IndexWindow { side: Side::Above, lo: t.m0() + 1, hi: t.k + t.l }
    }
}

/// Largest prime factor over a window, or the first element that is not
/// `bound`-smooth.
fn window_max_factor(elems: &[i64], bound: u64) -> Result<(u64, Option<i64>), ArithError> {
    let mut largest = 1u64;
    for &e in elems {
        if e < 2 {
            continue;
        }
        let s = smooth_split(&Natural::from(e as u64), bound.max(2))?;
        if !s.is_smooth() {
            return Ok((s.cofactor.to_u64().unwrap_or(u64::MAX), Some(e)));
        }
        if let Some(&(p, _)) = s.factors.last() {
            largest = largest.max(p);
        }
    }
    Ok((largest, None))
}

/// Every element of the two windows is `k0`-smooth.
pub fn check_window_smoothness(t: &ParamTuple) -> Result<LemmaReport, LemmaError> {
    let hyps = [
        ("binomial_equation", check_eq12(t)),
        ("k_above_m", t.k > t.m && t.m >= 0),
        ("l_above_delta", t.l > t.delta),
    ];
    let k0 = t.k0().max(2) as u64;
    let mut elems = IndexWindow::below(t).elements(t.n);
    elems.extend(IndexWindow::above(t).elements(t.n));
    let (largest, witness) = window_max_factor(&elems, k0)?;
    let mut printed = IndexWindow::below_printed(t).elements(t.n);
    printed.extend(IndexWindow::above(t).elements(t.n));
    let (_, printed_witness) = window_max_factor(&printed, k0)?;
    let raw = if witness.is_none() { VerdictKind::Holds } else { VerdictKind::Fails };
    let mut notes = vec![format!("k0={k0}, m0={}", t.m0())];
    if let Some(w) = witness {
        notes.push(format!("{w} has a prime factor above k0"));
    }
    notes.push(format!(
        "printed lower window: {}",
        if printed_witness.is_none() { "smooth" } else { "not smooth" }
    ));
    Ok(LemmaReport::build(
        "window_smoothness",
        &hyps,
        IntervalValue::point(largest as f64),
        IntervalValue::point(k0 as f64),
        raw,
        k0 as f64 - largest as f64,
        notes,
        vec![],
    ))
}

// ---------------------------------------------------------------------------
// valuation bound
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PiMode {
    Exact,
    Dusart,
}

fn pi_exact(x: u64) -> u64 {
    if x < 2 {
        0
    } else {
        primes_in(2, x).map(|s| s.count() as u64).unwrap_or(0)
    }
}

fn pi_value(x: i64, mode: PiMode) -> IntervalValue {
    match mode {
        PiMode::Exact => IntervalValue::point(pi_exact(x.max(0) as u64) as f64),
        PiMode::Dusart if x >= 2 => dusart_pi_upper(&n_iv(x)),
        PiMode::Dusart => IntervalValue::point(0.0),
    }
}

/// `(n-k)^{2k+l-m-m0-pi(k0)} <= (2k+l)^{pi(k0)} (k-m)! (l+k-m0)!` in logs.
pub fn check_valuation_bound(t: &ParamTuple, mode: PiMode) -> Result<LemmaReport, LemmaError> {
    let f = t.flags();
    let hyps = [("binomial_equation", check_eq12(t)), ("ordered", f.ordered), ("l_above_delta", f.l_above_delta)];
    if t.n - t.k < 1 || t.k < t.m || t.l + t.k < t.m0() {
        return Err(LemmaError::Argument(format!("tuple {t:?} leaves the factorial domain")));
    }
    let pi = pi_value(t.k0(), mode);
    let exponent = n_iv(2 * t.k + t.l - t.m - t.m0()) - pi;
    let lhs = exponent * n_iv(t.n - t.k).ln();
    let fact = |v: i64| log_factorial_exact(v as u64, ORACLE_DIGITS).map(|b| b.enclosure());
    let rhs = pi * n_iv(2 * t.k + t.l).ln() + fact(t.k - t.m)? + fact(t.l + t.k - t.m0())?;
    let v = compare(lhs, Relation::Le, rhs);
    let notes = vec![format!("pi mode {:?}, exponent {}", mode, exponent)];
    Ok(LemmaReport::build("valuation_bound", &hyps, lhs, rhs, v.kind, v.margin, notes, vec![]))
}

// ---------------------------------------------------------------------------
// sum threshold
// ---------------------------------------------------------------------------

/// The sum-threshold expression with `pi(2F)` replaced by its Dusart bound:
/// `pi(2F) log(2F-1) + f(0.265(F-1)) + f(F-0.735(F-1))
///  - (0.53(F-1) - pi(2F)) log((2F-2)^{3/2} - 2F + 1)`.
pub fn sum_threshold_expr<R: Real>(f: u64) -> R {
    let ff = R::big_int(f as i128);
    let fm1 = ff.clone() - R::int(1);
    let pi = dusart_pi_upper(&(R::int(2) * ff.clone()));
    let two_f_m2 = R::int(2) * ff.clone() - R::int(2);
    let pow = two_f_m2.clone() * two_f_m2.sqrt();
    pi.clone() * (R::int(2) * ff.clone() - R::int(1)).ln()
        + log_g_plus(&(R::decimal("0.265") * fm1.clone()))
        + log_g_plus(&(ff.clone() - R::decimal("0.735") * fm1.clone()))
        - (R::decimal("0.53") * fm1 - pi) * (pow - R::int(2) * ff + R::int(1)).ln()
}

/// `expr(F) >= 0`.
pub struct SumThreshold(pub u64);

impl Inequality for SumThreshold {
    fn relation(&self) -> Relation {
        Relation::Ge
    }
    fn sides<R: Real>(&self) -> (R, R) {
        (sum_threshold_expr(self.0), R::int(0))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Crossover {
    /// largest `F` with a nonnegative expression
    pub f_star: u64,
    pub at_f_star: IntervalValue,
    pub after_f_star: IntervalValue,
    pub search_lo: u64,
    pub search_hi: u64,
}

pub const SUM_THRESHOLD_SEARCH: (u64, u64) = (10_000, 10_000_000);

/// Bisection for the last `F` where the sum-threshold expression is
/// nonnegative, on a verified sign change.
pub fn sum_threshold_crossover() -> Result<Crossover, LemmaError> {
    let (lo0, hi0) = SUM_THRESHOLD_SEARCH;
    let sign = |f: u64| decide(&SumThreshold(f)).verdict.kind;
    if sign(lo0) != VerdictKind::Holds || sign(hi0) != VerdictKind::Fails {
        return Err(LemmaError::NoSignChange { lo: lo0, hi: hi0 });
    }
    let (mut lo, mut hi) = (lo0, hi0);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match sign(mid) {
            VerdictKind::Holds => lo = mid,
            VerdictKind::Fails => hi = mid,
            VerdictKind::Indeterminate => return Err(LemmaError::NoSignChange { lo, hi }),
        }
    }
    Ok(Crossover {
        f_star: lo,
        at_f_star: decide(&SumThreshold(lo)).lhs,
        after_f_star: decide(&SumThreshold(hi)).lhs,
        search_lo: lo0,
        search_hi: hi0,
    })
}

// ---------------------------------------------------------------------------
// n bound
// ---------------------------------------------------------------------------

/// Points `(k, l)` examined by [`max_n_from_valuation_bound`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NmaxGrid {
    pub k_lo: u64,
    pub k_hi: u64,
    /// every admissible `l` is tried for `k` up to here; beyond, only the
    /// smallest, middle and largest
    pub dense_l_until: u64,
    pub pi_mode: PiMode,
    pub threads: usize,
}

impl Default for NmaxGrid {
    fn default() -> Self {
        NmaxGrid { k_lo: 588, k_hi: 871_155, dense_l_until: 20_000, pi_mode: PiMode::Dusart, threads: 1 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NmaxReport {
    /// `exp(max log(n-k)) + k` at the maximizing point
    pub n_max: f64,
    pub log_n_minus_k: IntervalValue,
    pub argmax_k: u64,
    pub argmax_l: u64,
    pub points: u64,
    pub skipped: u64,
    pub reference: u64,
}

/// Bound stated in the source for comparison.
pub const NMAX_REFERENCE: u64 = 31_754_673_611;

fn l_choices(k: u64, dense_until: u64) -> Vec<u64> {
    let lmax = (271 * k / 100_000).max(1);
    if k <= dense_until {
        (1..=lmax).collect()
    } else {
        let mut v = vec![1, (1 + lmax) / 2, lmax];
        v.dedup();
        v
    }
}

/// Upper bound for `log(n - k)` from the valuation inequality at
/// `m = 0.735k`, `m0 = m + 1`, `delta = 0`; `None` if the exponent is not
/// positive.
pub fn log_n_bound(k: u64, l: u64, pi_k0: IntervalValue) -> Option<IntervalValue> {
    let kk = n_iv(k as i64);
    let ll = n_iv(l as i64);
    let m = IntervalValue::decimal("0.735") * kk;
    let m0 = m + IntervalValue::int(1);
    let two_k_l = IntervalValue::int(2) * kk + ll;
    let den = two_k_l - m - m0 - pi_k0;
    if !(den.lo() > 0.0) {
        return None;
    }
    let num = pi_k0 * two_k_l.ln() + log_g_plus(&(kk - m)) + log_g_plus(&(ll + kk - m0));
    Some(num / den)
}

fn prime_count_table(limit: u64) -> Vec<u32> {
    let mut table = vec![0u32; limit as usize + 1];
    if limit >= 2 {
        for p in primes_in(2, limit).expect("valid range") {
            table[p as usize] += 1;
        }
    }
    for i in 1..table.len() {
        table[i] += table[i - 1];
    }
    table
}

pub fn max_n_from_valuation_bound(grid: &NmaxGrid) -> Result<NmaxReport, LemmaError> {
    if grid.k_lo < 1 || grid.k_lo > grid.k_hi {
        return Err(LemmaError::Argument("empty k range".into()));
    }
    let k0_max = 2 * (grid.k_hi + 271 * grid.k_hi / 100_000 + 1);
    let table = match grid.pi_mode {
        PiMode::Exact => prime_count_table(k0_max),
        PiMode::Dusart => Vec::new(),
    };
    let pi_of = |k0: u64| match grid.pi_mode {
        PiMode::Exact => IntervalValue::point(table[k0 as usize] as f64),
        PiMode::Dusart => dusart_pi_upper(&n_iv(k0 as i64)),
    };
    type Best = (f64, u64, u64, IntervalValue);
    let eval_k = |k: u64| -> (Option<Best>, u64, u64) {
        let mut best: Option<Best> = None;
        let (mut points, mut skipped) = (0, 0);
        for l in l_choices(k, grid.dense_l_until) {
            points += 1;
            match log_n_bound(k, l, pi_of(2 * (k + l) - 1)) {
                Some(v) if best.as_ref().is_none_or(|b| v.hi() > b.0) => best = Some((v.hi(), k, l, v)),
                Some(_) => {}
                None => skipped += 1,
            }
        }
        (best, points, skipped)
    };
    // max with ties broken towards the lexicographically smaller (k, l)
    let pick = |a: Option<Best>, b: Option<Best>| match (a, b) {
        (Some(x), Some(y)) => Some(if y.0 > x.0 || (y.0 == x.0 && (y.1, y.2) < (x.1, x.2)) { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(grid.threads.max(1)).build().expect("thread pool");
    let (best, points, skipped) = pool.install(|| {
        (grid.k_lo..=grid.k_hi)
            .into_par_iter()
            .map(eval_k)
            .reduce(|| (None, 0, 0), |a, b| (pick(a.0, b.0), a.1 + b.1, a.2 + b.2))
    });
    let (_, k, l, v) = best.ok_or(LemmaError::EmptyGrid)?;
    Ok(NmaxReport {
        n_max: v.hi().exp() + k as f64,
        log_n_minus_k: v,
        argmax_k: k,
        argmax_l: l,
        points,
        skipped,
        reference: NMAX_REFERENCE,
    })
}

// ---------------------------------------------------------------------------
// binomial product bounds (n + k + l <= k0^{3/2})
// ---------------------------------------------------------------------------

/// `(k0 + 3 k0^{3/4}) log 2.83`
pub fn product_upper<R: Real>(k0: i64) -> R {
    let k = R::int(k0);
    let q = k.sqrt().sqrt();
    (k.clone() + R::int(3) * q.clone() * q.clone() * q) * R::decimal("2.83").ln()
}

/// `4.6623 k - 2.879 - log k`
pub fn product_lower<R: Real>(k: i64) -> R {
    let kk = R::int(k);
    R::decimal("4.6623") * kk.clone() - R::decimal("2.879") - kk.ln()
}

struct ProductBounds(ParamTuple);

impl Inequality for ProductBounds {
    fn relation(&self) -> Relation {
        Relation::Le
    }
    fn sides<R: Real>(&self) -> (R, R) {
        (product_lower(self.0.k), product_upper(self.0.k0()))
    }
}

/// Compares the exact `log(C(n-m-1, k-m) C(n+k+l, l+k-m0))` with its upper
/// and lower bounds, and decides whether lower <= upper is even possible.
/// FAILS means the two bounds are incompatible.
pub fn check_binomial_product_bounds(t: &ParamTuple) -> Result<LemmaReport, LemmaError> {
    let f = t.flags();
    let k0 = t.k0();
    let k0_15 = (k0.max(0) as f64).powf(1.5);
    let hyps = [
        ("ordered", f.ordered),
        ("m_small", f.m_small),
        ("l_small", 1000 * t.l < t.n),
        ("short_range", ((t.n + t.k + t.l) as f64) <= k0_15 && k0 > 0),
        ("n_large", f.n_large),
    ];
    let mut notes = Vec::new();
    let mut parts = Vec::new();
    let lower_r = t.l + t.k - t.m0();
    if t.n - t.m - 1 >= t.k - t.m && t.k > t.m && lower_r >= 0 && t.n + t.k + t.l >= lower_r {
        let exact = log_binomial_exact((t.n - t.m - 1) as u64, (t.k - t.m) as u64, ORACLE_DIGITS)?
            + log_binomial_exact((t.n + t.k + t.l) as u64, lower_r as u64, ORACLE_DIGITS)?;
        let e = exact.enclosure();
        notes.push(format!("exact log product {:.6}", e.mid()));
        let up = product_upper::<IntervalValue>(k0.max(1));
        let lo = product_lower::<IntervalValue>(t.k.max(1));
        let vu = compare(e, Relation::Le, up);
        let vl = compare(e, Relation::Gt, lo);
        parts.push(Part { name: "exact_below_upper".into(), lhs: e, relation: "<=", rhs: up, verdict: None, margin: vu.margin });
        parts.push(Part { name: "exact_above_lower".into(), lhs: e, relation: ">", rhs: lo, verdict: None, margin: vl.margin });
    }
    let d = decide(&ProductBounds(*t));
    Ok(LemmaReport::build(
        "binomial_product_bounds",
        &hyps,
        d.lhs,
        d.rhs,
        d.verdict.kind,
        d.verdict.margin,
        notes,
        parts,
    ))
}

/// `4.6623k - 1.8344 - log k > 1.0433k + 3.13 k^{3/4}`.
struct ContradictionAt(u64);

impl Inequality for ContradictionAt {
    fn relation(&self) -> Relation {
        Relation::Gt
    }
    fn sides<R: Real>(&self) -> (R, R) {
        let k = R::big_int(self.0 as i128);
        let q = k.sqrt().sqrt();
        let lhs = R::decimal("4.6623") * k.clone() - R::decimal("1.8344") - k.ln();
        let rhs = R::decimal("1.0433") * k + R::decimal("3.13") * q.clone() * q.clone() * q;
        (lhs, rhs)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Contradiction {
    pub k: u64,
    pub lhs: IntervalValue,
    pub rhs: IntervalValue,
    pub contradiction: bool,
}

/// Whether the lower bound exceeds the upper bound at `k`.
pub fn small_case_contradiction(k: u64) -> Result<Contradiction, LemmaError> {
    if k < 1 {
        return Err(LemmaError::Argument("k must be at least 1".into()));
    }
    let d = decide(&ContradictionAt(k));
    Ok(Contradiction { k, lhs: d.lhs, rhs: d.rhs, contradiction: d.verdict.kind == VerdictKind::Holds })
}

// ---------------------------------------------------------------------------
// large l
// ---------------------------------------------------------------------------

/// `(2n + l0)^{21/40} log(2n + l0) < 1.3132n - log(n)/2 - 0.5359` with
/// `l0 = (c n / log n)^{40/21}`.
struct LargeLConsistency {
    n: u64,
    c: f64,
}

impl Inequality for LargeLConsistency {
    fn relation(&self) -> Relation {
        Relation::Lt
    }
    fn sides<R: Real>(&self) -> (R, R) {
        let n = R::big_int(self.n as i128);
        let l0 = crate::bounds::threshold_power(&n, &R::from_f64(self.c));
        let s = R::int(2) * n.clone() + l0;
        let lhs = s.powr(&(R::int(21) / R::int(40))) * s.ln();
        (lhs, crate::bounds::central_binom_lower_expr(&n))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LargeLReport {
    pub n: u64,
    pub c: f64,
    pub thresholds: Section5Thresholds,
    pub consistency: LemmaReport,
}

/// Both thresholds for `l`, and whether any solution must exceed `l0`.
pub fn large_l_consistency(n: u64, c: f64) -> Result<LargeLReport, LemmaError> {
    let thresholds = large_l_thresholds(n, c)?;
    let d = decide(&LargeLConsistency { n, c });
    let hyps = [("n_large", n >= 500_000), ("c_below_critical", c > 0.0 && c < 0.68943)];
    let consistency =
        LemmaReport::build("large_l_consistency", &hyps, d.lhs, d.rhs, d.verdict.kind, d.verdict.margin, vec![], vec![]);
    Ok(LargeLReport { n, c, thresholds, consistency })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(d: i64, n: i64, m: i64, k: i64, l: i64) -> ParamTuple {
        ParamTuple::new(d, n, m, k, l)
    }

    #[test]
    fn identities_on_examples() {
        assert!(product_identity_holds(&t(0, 7, 1, 2, 1)));
        assert!(product_identity_holds(&t(0, 5, 1, 3, 11)));
        assert!(!product_identity_holds(&t(0, 7, 1, 2, 2)));
        assert!(ratio_identity_holds(&t(0, 7, 1, 2, 1)));
        // the printed index ranges miss the smallest collision
        assert!(!printed_product_identity_holds(&t(0, 7, 1, 2, 1)));
        assert!(!printed_ratio_identity_holds(&t(0, 7, 1, 2, 1)));
    }

    #[test]
    fn log_ratio_examples() {
        let r = check_log_ratio_bounds(&t(0, 7, 1, 2, 1));
        assert_eq!(r.verdict, VerdictKind::Holds);
        assert!((r.lhs.mid() - 1.5f64.ln()).abs() < 1e-12);
        assert!((r.rhs.mid() - 0.8).abs() < 1e-12);
        let lower = &r.parts[1];
        assert!((lower.lhs.mid() - (14.0f64 / 9.0).ln()).abs() < 1e-12);
        assert!((lower.rhs.mid() - 1.0 / 3.0).abs() < 1e-12);
        // printed lower bound fails on this collision: 0.4418 < 4/9
        assert_eq!(r.parts[2].verdict, None);
        assert!(r.parts[2].margin < 0.0);
        let g = check_log_ratio_bounds(&t(0, 5, 1, 3, 11));
        assert_eq!(g.verdict, VerdictKind::Indeterminate);
        assert!(g.notes.contains("ordered"));
    }

    #[test]
    fn forcing_examples() {
        let a = check_small_k_forcing(500_000, 587);
        assert_eq!(a.verdict, VerdictKind::Holds);
        assert!((a.lhs.mid() - 0.99779).abs() < 1e-4);
        let b = check_small_k_forcing(500_000, 588);
        assert_eq!(b.verdict, VerdictKind::Fails);
        assert!((b.lhs.mid() - 1.0012).abs() < 1e-4);
        assert_eq!(check_small_k_forcing(1_000_000_000, 587).verdict, VerdictKind::Holds);
        assert_eq!(check_small_k_forcing(1000, 5).verdict, VerdictKind::Indeterminate);
        assert!(k_in_forced_range(&t(0, 1_000_000, 100, 1000, 2)));
        assert!(!k_in_forced_range(&t(0, 1_000_000, 100, 587, 1)));
        assert!(l_in_forced_range(&t(0, 1_000_000, 100, 1000, 2)));
        assert!(!l_in_forced_range(&t(0, 1_000_000, 100, 1000, 3)));
    }

    #[test]
    fn smoothness_examples() {
        let r = check_window_smoothness(&t(0, 7, 1, 2, 1)).unwrap();
        assert_eq!(r.verdict, VerdictKind::Holds);
        assert_eq!((r.lhs.mid(), r.rhs.mid()), (5.0, 5.0));
        assert_eq!(IndexWindow::below(&t(0, 7, 1, 2, 1)).elements(7), vec![6]);
        assert_eq!(IndexWindow::above(&t(0, 7, 1, 2, 1)).elements(7), vec![9, 10]);
        let g = check_window_smoothness(&t(0, 5, 1, 3, 11)).unwrap();
        assert_eq!(g.verdict, VerdictKind::Holds);
        assert_eq!(g.rhs.mid(), 27.0);
        let bad = check_window_smoothness(&t(0, 7, 1, 2, 2)).unwrap();
        assert_eq!(bad.verdict, VerdictKind::Indeterminate);
    }

    #[test]
    fn valuation_examples() {
        let r = check_valuation_bound(&t(0, 7, 1, 2, 1), PiMode::Exact).unwrap();
        assert_eq!(r.verdict, VerdictKind::Holds);
        assert_eq!(r.lhs.mid(), 0.0);
        let d = check_valuation_bound(&t(0, 7, 1, 2, 1), PiMode::Dusart).unwrap();
        assert_eq!(d.verdict, VerdictKind::Holds);
        let diag = check_valuation_bound(&t(0, 1_000_000, 441, 600, 1), PiMode::Exact).unwrap();
        assert_eq!(diag.verdict, VerdictKind::Indeterminate);
        assert!(diag.lhs.is_finite() && diag.rhs.is_finite());
    }

    #[test]
    fn contradiction_examples() {
        let c = small_case_contradiction(588).unwrap();
        assert!(c.contradiction);
        assert!((c.lhs.mid() - 2733.2).abs() < 0.1);
        assert!((c.rhs.mid() - 987.2).abs() < 0.2);
        let c = small_case_contradiction(100_000).unwrap();
        assert!(c.contradiction);
        assert!((c.lhs.mid() - 466_216.0).abs() < 1.0);
        assert!((c.rhs.mid() - 121_931.0).abs() < 1.0);
        let c = small_case_contradiction(1).unwrap();
        assert!(!c.contradiction);
        assert!((c.lhs.mid() - 2.8279).abs() < 1e-4);
        assert!((c.rhs.mid() - 4.1733).abs() < 1e-4);
    }

    #[test]
    fn sum_threshold_signs() {
        assert_eq!(decide(&SumThreshold(100_000)).verdict.kind, VerdictKind::Holds);
        assert_eq!(decide(&SumThreshold(2_000_000)).verdict.kind, VerdictKind::Fails);
    }

    #[test]
    fn large_l_examples() {
        let r = large_l_consistency(1_000_000_000, 0.68).unwrap();
        assert_eq!(r.consistency.verdict, VerdictKind::Holds);
        assert!((r.consistency.lhs.mid() / 1.083e9 - 1.0).abs() < 0.01);
        assert!((r.consistency.rhs.mid() / 1.3132e9 - 1.0).abs() < 0.001);
        let g = large_l_consistency(1_000_000_000, 0.7).unwrap();
        assert_eq!(g.consistency.verdict, VerdictKind::Indeterminate);
    }

    #[test]
    fn report_json_shape() {
        let r = check_small_k_forcing(500_000, 587);
        let v = serde_json::to_value(&r).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        assert_eq!(keys, vec!["lemma", "hypotheses", "lhs", "rhs", "verdict", "notes"]);
        assert_eq!(v["verdict"], "HOLDS");
        assert!(v["lhs"].is_array());
    }
}
