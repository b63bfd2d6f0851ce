//! Midpoint-radius arithmetic on scaled integers.
//!
//! A [`Ball`] stores `mid` and `rad` as integers scaled by `2^PREC_BITS`; the
//! represented set is `[mid - rad, mid + rad] / 2^PREC_BITS`. Every operation
//! returns a ball that contains the exact result for all inputs in the operand
//! balls. Transcendental functions add a fixed slack that dominates the
//! truncation error of their series.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::interval::IntervalValue;
use super::Real;

/// Fractional bits carried by every ball (about 96 decimal digits).
pub const PREC_BITS: u32 = 320;

/// Decimal digits a ball of unit magnitude resolves after a few dozen
/// operations; the `digits` contract of the exact log-factorial is capped here.
pub const MAX_DECIMAL_DIGITS: u32 = 90;

const GUARD_BITS: u32 = 32;
const SERIES_SLACK_ULPS: u64 = 1 << 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    mid: BigInt,
    rad: BigUint,
}

fn unit() -> BigInt {
    BigInt::one() << PREC_BITS
}

fn ln2_scaled() -> &'static BigInt {
    static LN2: OnceLock<BigInt> = OnceLock::new();
    LN2.get_or_init(|| {
        let prec = PREC_BITS + GUARD_BITS;
        // ln 2 = 2 atanh(1/3)
        let third = (BigInt::one() << prec) / 3;
        let wide = atanh_series(&third, prec) * 2;
        round_shift(&wide, GUARD_BITS)
    })
}

fn pi_scaled() -> &'static BigInt {
    static PI: OnceLock<BigInt> = OnceLock::new();
    PI.get_or_init(|| {
        let prec = PREC_BITS + GUARD_BITS;
        // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
        let a = atan_inverse(5, prec) * 16;
        let b = atan_inverse(239, prec) * 4;
        round_shift(&(a - b), GUARD_BITS)
    })
}

fn round_shift(v: &BigInt, bits: u32) -> BigInt {
    let half = BigInt::one() << (bits - 1);
    (v + half) >> bits
}

/// `atanh(y)` for fixed-point `y` (scaled by `2^prec`), `|y| <= 1/3`.
fn atanh_series(y: &BigInt, prec: u32) -> BigInt {
    let y2 = (y * y) >> prec;
    let mut term = y.clone();
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    while !term.is_zero() {
        sum += &term / k;
        term = (&term * &y2) >> prec;
        k += 2;
    }
    sum
}

/// `atan(1/q)` at precision `prec`.
fn atan_inverse(q: u64, prec: u32) -> BigInt {
    let q2 = BigInt::from(q * q);
    let mut term = (BigInt::one() << prec) / q;
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    let mut positive = true;
    while !term.is_zero() {
        let t = &term / k;
        if positive {
            sum += t;
        } else {
            sum -= t;
        }
        term /= &q2;
        k += 2;
        positive = !positive;
    }
    sum
}

fn to_signed(v: BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, v)
}

/// Nearest f64 to `v / 2^PREC_BITS`, within a couple of ulps.
fn scaled_to_f64(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        let approx = v.to_f64().unwrap_or(if v.is_negative() { f64::MIN } else { f64::MAX });
        approx / 2f64.powi(PREC_BITS as i32)
    } else {
        let shift = bits - 900;
        let top = (v >> shift).to_f64().unwrap();
        top * 2f64.powi(shift as i32 - PREC_BITS as i32)
    }
}

impl Ball {
    pub fn exact_int(v: i128) -> Ball {
        Ball { mid: BigInt::from(v) << PREC_BITS, rad: BigUint::zero() }
    }

    pub fn from_bigint(v: &BigInt) -> Ball {
        Ball { mid: v << PREC_BITS, rad: BigUint::zero() }
    }

    /// `num / den` rounded to the nearest representable point, radius one ulp.
    pub fn from_ratio(num: &BigInt, den: &BigUint) -> Ball {
        assert!(!den.is_zero(), "zero denominator");
        let mid = (num << PREC_BITS).div_floor(&to_signed(den.clone()));
        let exact = (&mid * to_signed(den.clone())) == (num << PREC_BITS);
        Ball { mid, rad: if exact { BigUint::zero() } else { BigUint::one() } }
    }

    /// Every finite f64 is dyadic, so this is exact unless the value has
    /// bits below `2^-PREC_BITS`.
    pub fn from_f64(v: f64) -> Ball {
        assert!(v.is_finite(), "non-finite input {v}");
        if v == 0.0 {
            return Ball::exact_int(0);
        }
        let bits = v.to_bits();
        let exponent = ((bits >> 52) & 0x7ff) as i64;
        let fraction = bits & ((1u64 << 52) - 1);
        let (mantissa, exp2) = if exponent == 0 {
            (fraction, -1074i64)
        } else {
            (fraction | (1u64 << 52), exponent - 1075)
        };
        let mut m = BigInt::from(mantissa);
        if v < 0.0 {
            m = -m;
        }
        let shift = exp2 + PREC_BITS as i64;
        if shift >= 0 {
            Ball { mid: m << shift as usize, rad: BigUint::zero() }
        } else {
            let s = (-shift) as usize;
            let exact = (&m >> s) << s == m;
            Ball { mid: m >> s, rad: if exact { BigUint::zero() } else { BigUint::one() } }
        }
    }

    /// Parses a decimal literal such as `7.59`, `-0.2558` or `1e-5` exactly.
    pub fn parse_decimal(s: &str) -> Option<Ball> {
        let s = s.trim();
        let (mantissa, exp10) = match s.find(['e', 'E']) {
            Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
            None => (s, 0),
        };
        let (negative, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = match digits.find('.') {
            Some(pos) => (&digits[..pos], &digits[pos + 1..]),
            None => (digits, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let all: String = format!("{int_part}{frac_part}");
        let mut num: BigInt = all.parse().ok()?;
        if negative {
            num = -num;
        }
        let scale = exp10 - frac_part.len() as i32;
        if scale >= 0 {
            num *= BigInt::from(10u32).pow(scale as u32);
            Some(Ball::from_ratio(&num, &BigUint::one()))
        } else {
            let den = BigUint::from(10u32).pow((-scale) as u32);
            Some(Ball::from_ratio(&num, &den))
        }
    }

    pub fn lower(&self) -> BigInt {
        &self.mid - to_signed(self.rad.clone())
    }

    pub fn upper(&self) -> BigInt {
        &self.mid + to_signed(self.rad.clone())
    }

    pub fn is_positive(&self) -> bool {
        self.lower().is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.upper().is_negative()
    }

    /// Radius as a fraction of one, for diagnostics.
    pub fn radius_f64(&self) -> f64 {
        scaled_to_f64(&to_signed(self.rad.clone()))
    }

    pub fn mid_f64(&self) -> f64 {
        scaled_to_f64(&self.mid)
    }

    /// Number of correct decimal digits after the point the radius certifies.
    pub fn certified_decimals(&self) -> u32 {
        if self.rad.is_zero() {
            return (PREC_BITS as f64 * std::f64::consts::LOG10_2) as u32;
        }
        let r_bits = self.rad.bits() as i64;
        let frac_bits = PREC_BITS as i64 - r_bits;
        if frac_bits <= 0 {
            0
        } else {
            (frac_bits as f64 * std::f64::consts::LOG10_2).floor() as u32
        }
    }

    /// Renders the midpoint with `decimals` digits after the point.
    pub fn to_decimal_string(&self, decimals: u32) -> String {
        let ten = BigInt::from(10u32).pow(decimals);
        let scaled = (&self.mid * &ten + (BigInt::one() << (PREC_BITS - 1))) >> PREC_BITS;
        let negative = scaled.is_negative();
        let digits = scaled.abs().to_string();
        let digits = if digits.len() <= decimals as usize {
            format!("{}{}", "0".repeat(decimals as usize + 1 - digits.len()), digits)
        } else {
            digits
        };
        let split = digits.len() - decimals as usize;
        let sign = if negative { "-" } else { "" };
        if decimals == 0 {
            format!("{sign}{digits}")
        } else {
            format!("{sign}{}.{}", &digits[..split], &digits[split..])
        }
    }

    fn widen(mut self, ulps: &BigUint) -> Ball {
        self.rad += ulps;
        self
    }

    /// Contains every real whose scaled value lies between the two bounds.
    fn from_bounds(lo: BigInt, hi: BigInt) -> Ball {
        let sum = &lo + &hi;
        let mid = sum.div_floor(&BigInt::from(2));
        let rad = (&hi - &mid).max(&mid - &lo);
        Ball { mid, rad: rad.to_biguint().unwrap_or_default() + 1u32 }
    }

    fn ln_point(v: &BigUint) -> (BigInt, BigUint) {
        // v > 0 is the scaled argument; returns scaled ln(v / 2^P) and its error
        let nb = v.bits() as i64;
        let target = PREC_BITS as i64 + 1;
        let t = if nb > target { v >> (nb - target) as usize } else { v << (target - nb) as usize };
        let e = nb - 1 - PREC_BITS as i64;
        let one = BigUint::one() << PREC_BITS;
        let num = to_signed((&t - &one) << PREC_BITS);
        let den = to_signed(&t + &one);
        let y = num / den;
        let frac_ln = atanh_series(&y, PREC_BITS) * 2;
        let value = frac_ln + ln2_scaled() * e;
        let err = BigUint::from(SERIES_SLACK_ULPS) + BigUint::from(e.unsigned_abs() + 2);
        (value, err)
    }

    fn exp_point(x: &BigInt) -> BigInt {
        let ln2 = ln2_scaled();
        let k: BigInt = (x + (ln2 >> 1usize)).div_floor(ln2);
        let r = x - &k * ln2;
        // r in [-ln2/2, ln2/2]; reduce by 2^-10 then square back
        const HALVINGS: u32 = 10;
        let prec = PREC_BITS + GUARD_BITS;
        let r = (r << GUARD_BITS) >> HALVINGS;
        let one = BigInt::one() << prec;
        let mut term = one.clone();
        let mut sum = one.clone();
        let mut n = 1u64;
        loop {
            term = ((&term * &r) >> prec) / n;
            if term.is_zero() {
                break;
            }
            sum += &term;
            n += 1;
        }
        for _ in 0..HALVINGS {
            sum = (&sum * &sum) >> prec;
        }
        let k = k.to_i64().expect("exponent out of range");
        let shifted = if k >= 0 { sum << k as usize } else { sum >> (-k) as usize };
        shifted >> GUARD_BITS
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} +/- {:.3e}", self.to_decimal_string(30), self.radius_f64())
    }
}

impl Add for Ball {
    type Output = Ball;
    fn add(self, o: Ball) -> Ball {
        Ball { mid: self.mid + o.mid, rad: self.rad + o.rad }
    }
}

impl Sub for Ball {
    type Output = Ball;
    fn sub(self, o: Ball) -> Ball {
        Ball { mid: self.mid - o.mid, rad: self.rad + o.rad }
    }
}

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball { mid: -self.mid, rad: self.rad }
    }
}

impl Mul for Ball {
    type Output = Ball;
    fn mul(self, o: Ball) -> Ball {
        let mid = (&self.mid * &o.mid) >> PREC_BITS;
        let cross = self.mid.magnitude() * &o.rad + o.mid.magnitude() * &self.rad + &self.rad * &o.rad;
        let rad = (cross >> PREC_BITS) + 2u32;
        Ball { mid, rad }
    }
}

impl Div for Ball {
    type Output = Ball;
    fn div(self, o: Ball) -> Ball {
        let bm = o.mid.magnitude().clone();
        if bm <= o.rad {
            panic!("ball division by a ball containing zero");
        }
        let mid = (&self.mid << PREC_BITS) / &o.mid;
        let num = (&self.rad * &bm + self.mid.magnitude() * &o.rad) << PREC_BITS;
        let den = &bm * (&bm - &o.rad);
        let rad = num.div_ceil(&den) + 2u32;
        Ball { mid, rad }
    }
}

impl Real for Ball {
    fn int(v: i64) -> Self {
        Ball::exact_int(v as i128)
    }

    fn big_int(v: i128) -> Self {
        Ball::exact_int(v)
    }

    fn decimal(s: &str) -> Self {
        Ball::parse_decimal(s).unwrap_or_else(|| panic!("bad decimal literal {s:?}"))
    }

    fn from_f64(v: f64) -> Self {
        Ball::from_f64(v)
    }

    fn ln(&self) -> Self {
        let lo = self.lower();
        assert!(lo.is_positive(), "ln of a ball not bounded away from zero");
        let m = self.mid.to_biguint().expect("positive midpoint");
        let (value, err) = Ball::ln_point(&m);
        // |ln x - ln mid| <= rad / (mid - rad)
        let prop = if self.rad.is_zero() {
            BigUint::zero()
        } else {
            let lo_u = lo.to_biguint().unwrap();
            (&self.rad << PREC_BITS).div_ceil(&lo_u) + 1u32
        };
        Ball { mid: value, rad: err + prop }
    }

    fn exp(&self) -> Self {
        if self.rad > (BigUint::one() << (PREC_BITS - 2)) {
            let lo = Ball::exp_point(&self.lower());
            let hi = Ball::exp_point(&self.upper());
            let slack = (hi.magnitude() >> (PREC_BITS - 40)) + 8u32;
            return Ball::from_bounds(BigInt::zero().max(lo - to_signed(slack.clone())), hi + to_signed(slack));
        }
        let value = Ball::exp_point(&self.mid);
        let mag = value.magnitude().clone();
        // e^(m +/- r) - e^m <= e^m (e^r - 1) <= 2 r e^m for r < 1/4
        let prop = ((&mag * &self.rad) >> (PREC_BITS - 1)) + 1u32;
        let slack = (&mag >> (PREC_BITS - 24)) + BigUint::from(SERIES_SLACK_ULPS);
        Ball { mid: value, rad: prop + slack }
    }

    fn sqrt(&self) -> Self {
        let lo = self.lower();
        assert!(!lo.is_negative(), "sqrt of a ball with negative part");
        let m = self.mid.to_biguint().unwrap_or_default();
        let root = (&m << PREC_BITS).sqrt();
        let prop = if self.rad.is_zero() {
            BigUint::zero()
        } else if root.is_zero() {
            (&self.rad << PREC_BITS).sqrt() + 1u32
        } else {
            let by_slope = (&self.rad << PREC_BITS).div_ceil(&root);
            let by_root = (&self.rad << PREC_BITS).sqrt() + 1u32;
            by_slope.min(by_root)
        };
        Ball { mid: to_signed(root), rad: prop + 2u32 }
    }

    fn pi() -> Self {
        Ball { mid: pi_scaled().clone(), rad: BigUint::from(2u32) }
    }

    fn enclosure(&self) -> IntervalValue {
        let lo = scaled_to_f64(&self.lower());
        let hi = scaled_to_f64(&self.upper());
        IntervalValue::new(lo.next_down().next_down(), hi.next_up().next_up())
    }
}

impl Ball {
    pub fn widened(self, ulps: u64) -> Ball {
        self.widen(&BigUint::from(ulps))
    }

    pub fn one() -> Ball {
        Ball { mid: unit(), rad: BigUint::zero() }
    }
}
