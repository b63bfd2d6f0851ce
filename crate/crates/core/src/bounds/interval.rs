//! Binary64 interval arithmetic with outward widening.
//!
//! Basic operations are correctly rounded under IEEE 754, so widening each
//! endpoint by one ulp encloses the exact result. `ln` and `exp` come from the
//! platform libm, whose documented error is below one ulp; they are widened by
//! two.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::ser::SerializeTuple;
use serde::{Serialize, Serializer};

use super::Real;

const LIBM_ULPS: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalValue {
    lo: f64,
    hi: f64,
}

fn down(mut v: f64, ulps: u32) -> f64 {
    for _ in 0..ulps {
        v = v.next_down();
    }
    v
}

fn up(mut v: f64, ulps: u32) -> f64 {
    for _ in 0..ulps {
        v = v.next_up();
    }
    v
}

impl IntervalValue {
    /// Panics if `lo > hi` or either endpoint is NaN.
    pub fn new(lo: f64, hi: f64) -> IntervalValue {
        assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        IntervalValue { lo, hi }
    }

    pub fn point(v: f64) -> IntervalValue {
        IntervalValue::new(v, v)
    }

    /// The whole real line; produced when an operation leaves its domain.
    pub fn entire() -> IntervalValue {
        IntervalValue { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        if self.lo.is_finite() && self.hi.is_finite() {
            self.lo / 2.0 + self.hi / 2.0
        } else {
            f64::NAN
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    fn outward(lo: f64, hi: f64, ulps: u32) -> IntervalValue {
        if lo.is_nan() || hi.is_nan() {
            return IntervalValue::entire();
        }
        IntervalValue { lo: down(lo, ulps), hi: up(hi, ulps) }
    }

    pub fn max(self, o: IntervalValue) -> IntervalValue {
        IntervalValue { lo: self.lo.max(o.lo), hi: self.hi.max(o.hi) }
    }

    pub fn powi(self, n: u32) -> IntervalValue {
        let mut acc = IntervalValue::point(1.0);
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }
}

impl fmt::Display for IntervalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.12e}, {:.12e}]", self.lo, self.hi)
    }
}

impl Serialize for IntervalValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&self.lo)?;
        t.serialize_element(&self.hi)?;
        t.end()
    }
}

impl Add for IntervalValue {
    type Output = IntervalValue;
    fn add(self, o: IntervalValue) -> IntervalValue {
        IntervalValue::outward(self.lo + o.lo, self.hi + o.hi, 1)
    }
}

impl Sub for IntervalValue {
    type Output = IntervalValue;
    fn sub(self, o: IntervalValue) -> IntervalValue {
        IntervalValue::outward(self.lo - o.hi, self.hi - o.lo, 1)
    }
}

impl Neg for IntervalValue {
    type Output = IntervalValue;
    fn neg(self) -> IntervalValue {
        IntervalValue { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for IntervalValue {
    type Output = IntervalValue;
    fn mul(self, o: IntervalValue) -> IntervalValue {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        if c.iter().any(|v| v.is_nan()) {
            return IntervalValue::entire();
        }
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        IntervalValue::outward(lo, hi, 1)
    }
}

impl Div for IntervalValue {
    type Output = IntervalValue;
    fn div(self, o: IntervalValue) -> IntervalValue {
        if o.lo <= 0.0 && o.hi >= 0.0 {
            return IntervalValue::entire();
        }
        let c = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        if c.iter().any(|v| v.is_nan()) {
            return IntervalValue::entire();
        }
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        IntervalValue::outward(lo, hi, 1)
    }
}

/// Enclosure of a decimal literal: exact for integers below 2^53, otherwise
/// the two neighbours of the correctly rounded parse.
fn decimal_enclosure(s: &str) -> IntervalValue {
    let v: f64 = s.trim().parse().unwrap_or_else(|_| panic!("bad decimal literal {s:?}"));
    if v.fract() == 0.0 && v.abs() < 9.007_199_254_740_992e15 && !s.contains(['e', 'E']) {
        return IntervalValue::point(v);
    }
    IntervalValue::outward(v, v, 1)
}

impl Real for IntervalValue {
    fn int(v: i64) -> Self {
        let f = v as f64;
        if f as i64 == v && v.unsigned_abs() < (1u64 << 53) {
            IntervalValue::point(f)
        } else {
            IntervalValue::outward(f, f, 1)
        }
    }

    fn big_int(v: i128) -> Self {
        let f = v as f64;
        if v.unsigned_abs() < (1u128 << 53) {
            IntervalValue::point(f)
        } else {
            IntervalValue::outward(f, f, 1)
        }
    }

    fn decimal(s: &str) -> Self {
        decimal_enclosure(s)
    }

    fn from_f64(v: f64) -> Self {
        IntervalValue::point(v)
    }

    fn ln(&self) -> Self {
        if !(self.hi > 0.0) {
            return IntervalValue::entire();
        }
        let lo = if self.lo > 0.0 { down(self.lo.ln(), LIBM_ULPS) } else { f64::NEG_INFINITY };
        IntervalValue { lo, hi: up(self.hi.ln(), LIBM_ULPS) }
    }

    fn exp(&self) -> Self {
        let lo = down(self.lo.exp(), LIBM_ULPS).max(0.0);
        IntervalValue { lo, hi: up(self.hi.exp(), LIBM_ULPS) }
    }

    fn sqrt(&self) -> Self {
        if self.hi < 0.0 {
            return IntervalValue::entire();
        }
        let lo = if self.lo > 0.0 { down(self.lo.sqrt(), 1).max(0.0) } else { 0.0 };
        IntervalValue { lo, hi: up(self.hi.sqrt(), 1) }
    }

    fn pi() -> Self {
        IntervalValue::outward(std::f64::consts::PI, std::f64::consts::PI, 1)
    }

    fn enclosure(&self) -> IntervalValue {
        *self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_outward() {
        let a = IntervalValue::decimal("0.1");
        let b = IntervalValue::decimal("0.2");
        let s = a + b;
        assert!(s.contains(0.30000000000000004) && s.contains(0.3));
        let p = IntervalValue::int(3) * IntervalValue::decimal("0.1");
        assert!(p.lo() < 0.3 && p.hi() > 0.3);
        assert_eq!(IntervalValue::decimal("588"), IntervalValue::point(588.0));
    }

    #[test]
    fn domain_exits_are_entire() {
        let z = IntervalValue::new(-1.0, 1.0);
        assert!(!(IntervalValue::int(1) / z).is_finite());
        assert!(!IntervalValue::point(-2.0).ln().is_finite());
    }

    #[test]
    fn transcendental_enclosures() {
        let l = IntervalValue::int(100).ln();
        assert!(l.contains(100f64.ln()));
        assert!(l.width() < 1e-14);
        let e = IntervalValue::decimal("2.83").ln();
        assert!(e.lo() > 1.04 && e.hi() < 1.041);
    }
}
