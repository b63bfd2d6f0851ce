//! Explicit analytic estimates: the Dusart upper bound for pi(x), the Robbins
//! bracketing of factorials, the linear psi bound, the entropy rate `h`, the
//! two log-binomial lower bounds used in the small-l case, and the thresholds
//! for large l.
//!
//! Every formula is written once, generically over [`Real`], and evaluated
//! either in binary64 intervals or in high-precision balls. All decimal
//! constants enter through [`Real::decimal`], so they are enclosed exactly.

pub mod ball;
pub mod interval;
pub mod verdict;

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::Serialize;
use thiserror::Error;

pub use ball::Ball;
pub use interval::IntervalValue;
pub use verdict::{compare, decide, decide_high_precision, Decision, Inequality, Precision, Relation, Verdict, VerdictKind};

/// Number model shared by the binary64 interval tier and the ball tier.
pub trait Real:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn int(v: i64) -> Self;
    fn big_int(v: i128) -> Self;
    /// Exact enclosure of a decimal literal.
    fn decimal(s: &str) -> Self;
    fn from_f64(v: f64) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn pi() -> Self;
    fn enclosure(&self) -> IntervalValue;

    fn powr(&self, e: &Self) -> Self {
        (self.ln() * e.clone()).exp()
    }

    fn sq(&self) -> Self {
        self.clone() * self.clone()
    }

    fn recip(&self) -> Self {
        Self::int(1) / self.clone()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("{what} requires {requirement}, got {value}")]
    Domain { what: &'static str, requirement: &'static str, value: f64 },
}

fn domain(what: &'static str, requirement: &'static str, value: f64) -> BoundsError {
    BoundsError::Domain { what, requirement, value }
}

/// Below this `x` the prime-existence interval is refused.
pub const DUSART_INTERVAL_FLOOR: f64 = 500_000.0;

// ---------------------------------------------------------------------------
// generic formulas
// ---------------------------------------------------------------------------

/// `(x / log x)(1 + 1/log x + 2/log^2 x + 7.59/log^3 x)`
pub fn dusart_pi_upper<R: Real>(x: &R) -> R {
    let l = x.ln();
    let inv = l.recip();
    let poly = R::int(1) + inv.clone() + R::int(2) * inv.sq() + R::decimal("7.59") * inv.sq() * inv;
    x.clone() / l * poly
}

fn stirling_core<R: Real>(z: &R) -> R {
    z.clone() * z.ln() - z.clone() + (R::int(2) * R::pi() * z.clone()).ln() / R::int(2)
}

/// `log g^-(z) = z log z - z + log(2 pi z)/2 + 1/(12(z+1))`
pub fn log_g_minus<R: Real>(z: &R) -> R {
    stirling_core(z) + (R::int(12) * (z.clone() + R::int(1))).recip()
}

/// `log g^+(z) = z log z - z + log(2 pi z)/2 + 1/(12 z)`; also the function `f`
/// of the sum-threshold argument.
pub fn log_g_plus<R: Real>(z: &R) -> R {
    stirling_core(z) + (R::int(12) * z.clone()).recip()
}

pub fn psi_linear<R: Real>(z: &R) -> R {
    R::decimal("1.03883") * z.clone()
}

/// `h(a, l) = 0.265(1 + log((1-a)/(0.265 a))) + (0.265+l)(1 + log((1+0.735a)/(a(0.265+l))))`
pub fn h_rate_expr<R: Real>(alpha: &R, lambda: &R) -> R {
    let c = R::decimal("0.265");
    let cl = c.clone() + lambda.clone();
    let first = c.clone() * (R::int(1) + ((R::int(1) - alpha.clone()) / (c * alpha.clone())).ln());
    let second = cl.clone()
        * (R::int(1) + ((R::int(1) + R::decimal("0.735") * alpha.clone()) / (alpha.clone() * cl)).ln());
    first + second
}

/// Lower bound for `log C(n-m-1, k-m)` with `k = alpha n`, `m <= 0.735k`.
pub fn log_binom_lower_first<R: Real>(alpha: &R, n: &R) -> R {
    let c = R::decimal("0.265");
    let an = alpha.clone() * n.clone();
    c.clone() * an.clone() * (R::int(1) + ((R::int(1) - alpha.clone()) / (c * alpha.clone())).ln())
        - an.ln() / R::int(2)
        - R::decimal("0.2558")
}

/// Lower bound for `log C(n+k+l, k+l-m0)` with `l = lambda k`.
pub fn log_binom_lower_second<R: Real>(alpha: &R, lambda: &R, n: &R) -> R {
    let cl = R::decimal("0.265") + lambda.clone();
    let an = alpha.clone() * n.clone();
    cl.clone()
        * an
        * (R::int(1) + ((R::int(1) + R::decimal("0.735") * alpha.clone()) / (cl * alpha.clone())).ln())
        + (alpha.clone() / n.clone()).ln() / R::int(2)
        - R::decimal("1.5794")
}

/// `n (1.3132 log^2(2n) - 2.00271)`
pub fn threshold_log_squared<R: Real>(n: &R) -> R {
    let l = (R::int(2) * n.clone()).ln();
    n.clone() * (R::decimal("1.3132") * l.sq() - R::decimal("2.00271"))
}

/// `(c n / log n)^(40/21)`
pub fn threshold_power<R: Real>(n: &R, c: &R) -> R {
    let base = c.clone() * n.clone() / n.ln();
    base.powr(&(R::int(40) / R::int(21)))
}

pub fn critical_constant<R: Real>() -> R {
    R::decimal("1.3132") * R::int(21) / R::int(40)
}

/// `1.3132 n - log(n)/2 - 0.5359`
pub fn central_binom_lower_expr<R: Real>(n: &R) -> R {
    R::decimal("1.3132") * n.clone() - n.ln() / R::int(2) - R::decimal("0.5359")
}

/// `log((2/0.735)^2 / ((2/0.735) - 1)^1.265)`, the growth rate the
/// central-binomial bound relies on.
pub fn central_binom_rate<R: Real>() -> R {
    let r = R::int(2) / R::decimal("0.735");
    let num = r.sq();
    let den = (r - R::int(1)).powr(&R::decimal("1.265"));
    (num / den).ln()
}

// ---------------------------------------------------------------------------
// public evaluators
// ---------------------------------------------------------------------------

pub fn pi_upper_dusart(x: f64) -> Result<IntervalValue, BoundsError> {
    if !(x > 1.0) || !x.is_finite() {
        return Err(domain("pi_upper_dusart", "x > 1", x));
    }
    Ok(dusart_pi_upper(&IntervalValue::from_f64(x)))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct StirlingBounds {
    pub log_g_minus: IntervalValue,
    pub log_g_plus: IntervalValue,
}

impl StirlingBounds {
    /// `f(nu) = log g^+(nu)`.
    pub fn f(&self) -> IntervalValue {
        self.log_g_plus
    }
}

pub fn stirling_log_bounds(nu: u64) -> Result<StirlingBounds, BoundsError> {
    if nu < 2 {
        return Err(domain("stirling_log_bounds", "nu >= 2", nu as f64));
    }
    let z = IntervalValue::big_int(nu as i128);
    Ok(StirlingBounds { log_g_minus: log_g_minus(&z), log_g_plus: log_g_plus(&z) })
}

/// `f(z) = log g^+(z)` for real `z > 0`.
pub fn f_plus(z: f64) -> Result<IntervalValue, BoundsError> {
    if !(z > 0.0) {
        return Err(domain("f", "z > 0", z));
    }
    Ok(log_g_plus(&IntervalValue::from_f64(z)))
}

pub fn psi_upper_linear(z: f64) -> Result<IntervalValue, BoundsError> {
    if !(z > 0.0) {
        return Err(domain("psi_upper_linear", "z > 0", z));
    }
    Ok(psi_linear(&IntervalValue::from_f64(z)))
}

/// `1.03883 < log 2.83`: the linear psi constant fits under `log 2.83`.
pub struct PsiConstantCheck;

impl Inequality for PsiConstantCheck {
    fn relation(&self) -> Relation {
        Relation::Lt
    }
    fn sides<R: Real>(&self) -> (R, R) {
        (R::decimal("1.03883"), R::decimal("2.83").ln())
    }
}

pub fn h_rate(alpha: f64, lambda: f64) -> Result<IntervalValue, BoundsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain("h_rate", "0 < alpha < 1", alpha));
    }
    if !(lambda >= 0.0) {
        return Err(domain("h_rate", "lambda >= 0", lambda));
    }
    Ok(h_rate_expr(&IntervalValue::from_f64(alpha), &IntervalValue::from_f64(lambda)))
}

/// `h(0.00151, 0) > 4.6623`.
pub struct HRateFloor;

impl Inequality for HRateFloor {
    fn relation(&self) -> Relation {
        Relation::Gt
    }
    fn sides<R: Real>(&self) -> (R, R) {
        (h_rate_expr(&R::decimal("0.00151"), &R::int(0)), R::decimal("4.6623"))
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LogBinomLowers {
    /// lower bound for `log C(n-m-1, k-m)`
    pub first: IntervalValue,
    /// lower bound for `log C(n+k+l, k+l-m0)`
    pub second: IntervalValue,
}

/// The two log-binomial lower bounds. `alpha = k/n` and `lambda = l/k`; pass
/// them exactly as ratios via [`log_binom_lowers_exact`] when `k, l` are known.
pub fn log_binom_lowers(alpha: f64, lambda: f64, n: u64) -> Result<LogBinomLowers, BoundsError> {
    check_small_l_regime(alpha * n as f64, alpha, lambda, n)?;
    let a = IntervalValue::from_f64(alpha);
    let l = IntervalValue::from_f64(lambda);
    let nn = IntervalValue::big_int(n as i128);
    Ok(LogBinomLowers { first: log_binom_lower_first(&a, &nn), second: log_binom_lower_second(&a, &l, &nn) })
}

/// Same bounds with `alpha = k/n` and `lambda = l/k` formed as exact ratios.
pub fn log_binom_lowers_exact(k: u64, l: u64, n: u64) -> Result<LogBinomLowers, BoundsError> {
    check_small_l_regime(k as f64, k as f64 / n as f64, l as f64 / k.max(1) as f64, n)?;
    let nn = IntervalValue::big_int(n as i128);
    let kk = IntervalValue::big_int(k as i128);
    let a = kk / nn;
    let lam = IntervalValue::big_int(l as i128) / kk;
    Ok(LogBinomLowers { first: log_binom_lower_first(&a, &nn), second: log_binom_lower_second(&a, &lam, &nn) })
}

fn check_small_l_regime(k: f64, alpha: f64, lambda: f64, n: u64) -> Result<(), BoundsError> {
    if n < 500_000 {
        return Err(domain("log_binom_lowers", "n >= 500000", n as f64));
    }
    if k < 588.0 - 1e-9 {
        return Err(domain("log_binom_lowers", "k = alpha n >= 588", k));
    }
    if !(alpha > 0.0 && alpha <= 0.00151) {
        return Err(domain("log_binom_lowers", "0 < alpha <= 0.00151", alpha));
    }
    if !(lambda >= 0.0 && lambda <= 0.00271) {
        return Err(domain("log_binom_lowers", "0 <= lambda <= 0.00271", lambda));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Section5Thresholds {
    /// `n (1.3132 log^2(2n) - 2.00271)`
    pub t_log2: IntervalValue,
    /// `(c n / log n)^(40/21)`
    pub t_pow: IntervalValue,
    /// `1.3132 * 21/40`
    pub c_star: IntervalValue,
}

pub fn large_l_thresholds(n: u64, c: f64) -> Result<Section5Thresholds, BoundsError> {
    if n < 500_000 {
        return Err(domain("large_l_thresholds", "n >= 500000", n as f64));
    }
    if !(c > 0.0) {
        return Err(domain("large_l_thresholds", "c > 0", c));
    }
    let nn = IntervalValue::big_int(n as i128);
    Ok(Section5Thresholds {
        t_log2: threshold_log_squared(&nn),
        t_pow: threshold_power(&nn, &IntervalValue::from_f64(c)),
        c_star: critical_constant::<IntervalValue>(),
    })
}

/// Interval `(x, x (1 + 1/log^3 x)]` in which a prime is asserted to exist.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PrimeWindow {
    pub open_lo: f64,
    pub hi: IntervalValue,
}

impl PrimeWindow {
    pub fn length(&self) -> IntervalValue {
        self.hi - IntervalValue::from_f64(self.open_lo)
    }
}

pub fn dusart_interval(x: f64) -> Result<PrimeWindow, BoundsError> {
    if !(x >= DUSART_INTERVAL_FLOOR) || !x.is_finite() {
        return Err(domain("dusart_interval", "x >= 500000", x));
    }
    let xx = IntervalValue::from_f64(x);
    let l = xx.ln();
    let hi = xx * (IntervalValue::int(1) + (l * l * l).recip());
    Ok(PrimeWindow { open_lo: x, hi })
}

pub fn central_binom_lower(n: u64) -> Result<IntervalValue, BoundsError> {
    if n < 500_000 {
        return Err(domain("central_binom_lower", "n >= 500000", n as f64));
    }
    Ok(central_binom_lower_expr(&IntervalValue::big_int(n as i128)))
}

/// `log((2/0.735)^2/((2/0.735)-1)^1.265) >= 1.3132`.
pub struct CentralRateCheck;

impl Inequality for CentralRateCheck {
    fn relation(&self) -> Relation {
        Relation::Ge
    }
    fn sides<R: Real>(&self) -> (R, R) {
        (central_binom_rate(), R::decimal("1.3132"))
    }
}

/// `1.3132 * 21/40 = 0.68943` to five decimals.
pub struct CriticalConstantCheck;

impl Inequality for CriticalConstantCheck {
    fn relation(&self) -> Relation {
        Relation::Lt
    }
    fn sides<R: Real>(&self) -> (R, R) {
        let diff = critical_constant::<R>() - R::decimal("0.68943");
        let abs = if diff.enclosure().lo() >= 0.0 { diff } else { -diff };
        (abs, R::decimal("0.000005"))
    }
}
