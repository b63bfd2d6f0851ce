//! Repeated values in Pascal's triangle.
//!
//! A representation `(x, a)` of `N = C(x, a)` is canonical when
//! `2 <= a <= x/2`. A collision is a value with two or more canonical
//! representations.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, Write};

use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{binomial, fibonacci, Natural};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CollisionError {
    #[error("value bound must be at least 6")]
    BoundTooSmall,
    #[error("need x > y, got x = {x}, y = {y}")]
    RowOrder { x: u64, y: u64 },
    #[error("need y >= 2b, got y = {y}, b = {b}")]
    NotCanonical { y: u64, b: u64 },
    #[error("coordinates out of range: {0}")]
    Range(String),
}

/// `N = C(x, a)` with `2 <= a <= x/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Representation {
    pub x: u64,
    pub a: u64,
}

impl Serialize for Representation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.x, self.a].serialize(s)
    }
}

/// A value with all of its canonical representations, by descending row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionRecord {
    pub n: Natural,
    pub reps: Vec<Representation>,
}

impl Serialize for CollisionRecord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CollisionRecord", 2)?;
        st.serialize_field("N", &self.n.to_string())?;
        st.serialize_field("reps", &self.reps)?;
        st.end()
    }
}

impl CollisionRecord {
    /// Every representation evaluates to `n`.
    pub fn verify(&self) -> bool {
        self.reps.len() >= 2
            && self.reps.iter().all(|r| 2 <= r.a && 2 * r.a <= r.x && binomial(r.x, r.a as i64) == self.n)
    }
}

fn into_records(index: BTreeMap<Natural, Vec<Representation>>) -> Vec<CollisionRecord> {
    index
        .into_iter()
        .filter(|(_, reps)| reps.len() >= 2)
        .map(|(n, mut reps)| {
            reps.sort_by(|p, q| q.cmp(p));
            reps.dedup();
            CollisionRecord { n, reps }
        })
        .filter(|r| r.reps.len() >= 2)
        .collect()
}

/// Row `x` with `C(x, 2) = n`, if `n` is triangular.
fn triangular_row(n: &Natural) -> Option<u64> {
    let d = n * 8u32 + 1u32;
    let s = d.sqrt();
    if &s * &s != d {
        return None;
    }
    ((s + 1u32) / 2u32).to_u64()
}

/// All collisions with value at most `v_max`, ascending in `N`.
pub fn enumerate_collisions(v_max: &Natural) -> Result<Vec<CollisionRecord>, CollisionError> {
    if *v_max < Natural::from(6u32) {
        return Err(CollisionError::BoundTooSmall);
    }
    let mut index: BTreeMap<Natural, Vec<Representation>> = BTreeMap::new();
    // a = 2 is recovered from the index by a square-root test; two
    // representations with a = 2 never share a value
    let mut a = 3u64;
    while binomial(2 * a, a as i64) <= *v_max {
        let mut x = 2 * a;
        let mut c = binomial(x, a as i64);
        while c <= *v_max {
            index.entry(c.clone()).or_default().push(Representation { x, a });
            x += 1;
            c = c * x / (x - a);
        }
        a += 1;
    }
    for (n, reps) in index.iter_mut() {
        if let Some(x) = triangular_row(n) {
            if x >= 4 {
                reps.push(Representation { x, a: 2 });
            }
        }
    }
    Ok(into_records(index))
}

/// Row `x >= 2a` with `C(x, a) = n`, if any.
fn solve_row(n: &Natural, a: u64) -> Option<u64> {
    if a == 2 {
        return triangular_row(n).filter(|&x| x >= 4);
    }
    let fact: Natural = (2..=a).fold(Natural::one(), |acc, i| acc * i);
    let target = n * &fact;
    let r = target.nth_root(a as u32);
    // x(x-1)...(x-a+1) <= (x - (a-1)/2)^a gives x >= r + ceil((a-1)/2)
    let mut x = (r + a / 2).to_u64()?.max(a);
    loop {
        let p = (0..a).fold(Natural::one(), |acc, i| acc * (x - i));
        if p == target {
            return (x >= 2 * a).then_some(x);
        }
        if p > target {
            return None;
        }
        x += 1;
    }
}

/// Below this `a`, rows are solved per value; from it on, rows are scanned.
const ROW_SCAN_FROM: u64 = 25;

/// Every collision having a canonical representation in a row `<= y_max`,
/// with all its representations (including ones in higher rows).
pub fn collisions_below_row(y_max: u64) -> Vec<CollisionRecord> {
    let mut values: HashMap<Natural, Vec<Representation>> = HashMap::new();
    let mut v_max = Natural::zero();
    for y in 4..=y_max {
        let mut c = Natural::from(y * (y - 1) / 2);
        for b in 2..=y / 2 {
            if b > 2 {
                c = c * (y - b + 1) / b;
            }
            if c > v_max {
                v_max = c.clone();
            }
            values.entry(c.clone()).or_default();
        }
    }
    let keys: Vec<Natural> = values.keys().cloned().collect();
    for n in &keys {
        for a in 2..ROW_SCAN_FROM {
            if let Some(x) = solve_row(n, a) {
                values.get_mut(n).unwrap().push(Representation { x, a });
            }
        }
    }
    let mut a = ROW_SCAN_FROM;
    while binomial(2 * a, a as i64) <= v_max {
        let mut x = 2 * a;
        let mut c = binomial(x, a as i64);
        while c <= v_max {
            if let Some(reps) = values.get_mut(&c) {
                reps.push(Representation { x, a });
            }
            x += 1;
            c = c * x / (x - a);
        }
        a += 1;
    }
    into_records(values.into_iter().collect())
}

/// One `{"N": "...", "reps": [[x, a], ...]}` object per line.
pub fn write_collisions_jsonl<W: Write>(records: &[CollisionRecord], mut w: W) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Fibonacci family
// ---------------------------------------------------------------------------

/// `C(x, a) = C(y, b)` with `x = F_{2i+2} F_{2i+3}`, `a = F_{2i} F_{2i+3}`,
/// `y = x - 1`, `b = a + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FibMember {
    pub i: u64,
    pub x: u64,
    pub a: u64,
    pub y: u64,
    pub b: u64,
    pub verified: bool,
}

/// Members whose row exceeds this are returned unverified.
pub const FIB_VERIFY_MAX_ROW: u64 = 200_000;

pub fn fib_identity(i: u64) -> Result<FibMember, CollisionError> {
    let f = |j: u64| fibonacci(j).to_u64().ok_or_else(|| CollisionError::Range(format!("F_{j} exceeds u64")));
    let f3 = f(2 * i + 3)?;
    let x = f(2 * i + 2)?.checked_mul(f3).ok_or_else(|| CollisionError::Range("row exceeds u64".into()))?;
    let a = f(2 * i)? * f3;
    let (y, b) = (x - 1, a + 1);
    let verified = x <= FIB_VERIFY_MAX_ROW && binomial(x, a as i64) == binomial(y, b as i64);
    Ok(FibMember { i, x, a, y, b, verified })
}

// ---------------------------------------------------------------------------
// parametrization
// ---------------------------------------------------------------------------

/// `y = 2n + delta`, `x = 2n + l`, `b = n - m`, `a = n - k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ParamTuple {
    pub delta: i64,
    pub n: i64,
    pub m: i64,
    pub k: i64,
    pub l: i64,
}

/// Predicates of the standing assumptions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisFlags {
    /// `0 <= m < k < n/2`
    pub ordered: bool,
    /// `m <= 0.735k`
    pub m_small: bool,
    /// `l > delta`
    pub l_above_delta: bool,
    /// `n >= 500000`
    pub n_large: bool,
}

impl HypothesisFlags {
    pub fn all(&self) -> bool {
        self.ordered && self.m_small && self.l_above_delta && self.n_large
    }

    pub fn all_but_size(&self) -> bool {
        self.ordered && self.m_small && self.l_above_delta
    }
}

impl ParamTuple {
    pub fn new(delta: i64, n: i64, m: i64, k: i64, l: i64) -> ParamTuple {
        ParamTuple { delta, n, m, k, l }
    }

    /// `k0 = 2(k + l) - delta - 1`
    pub fn k0(&self) -> i64 {
        2 * (self.k + self.l) - self.delta - 1
    }

    /// `m0 = max(m + delta, floor(l/2))`
    pub fn m0(&self) -> i64 {
        (self.m + self.delta).max(self.l.div_euclid(2))
    }

    pub fn flags(&self) -> HypothesisFlags {
        HypothesisFlags {
            ordered: 0 <= self.m && self.m < self.k && 2 * self.k < self.n,
            m_small: 1000 * self.m <= 735 * self.k,
            l_above_delta: self.l > self.delta,
            n_large: self.n >= 500_000,
        }
    }

    /// Fields are in the range where both binomials are defined.
    pub fn in_range(&self) -> bool {
        (self.delta == 0 || self.delta == 1)
            && self.n >= 0
            && self.l >= self.delta
            && self.m <= self.n
            && self.k <= self.n
            && 2 * self.n + self.delta >= 0
    }
}

impl Serialize for ParamTuple {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ParamTuple", 8)?;
        st.serialize_field("delta", &self.delta)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("l", &self.l)?;
        st.serialize_field("k0", &self.k0())?;
        st.serialize_field("m0", &self.m0())?;
        st.serialize_field("flags", &self.flags())?;
        st.end()
    }
}

pub fn to_param(x: u64, a: u64, y: u64, b: u64) -> Result<ParamTuple, CollisionError> {
    if x <= y {
        return Err(CollisionError::RowOrder { x, y });
    }
    if y < 2 * b {
        return Err(CollisionError::NotCanonical { y, b });
    }
    let (x, a, y, b) = (x as i64, a as i64, y as i64, b as i64);
    let delta = y % 2;
    let n = (y - delta) / 2;
    Ok(ParamTuple { delta, n, m: n - b, k: n - a, l: x - 2 * n })
}

/// Inverse of [`to_param`]: `(x, a, y, b)`.
pub fn from_param(t: &ParamTuple) -> (i64, i64, i64, i64) {
    (2 * t.n + t.l, t.n - t.k, 2 * t.n + t.delta, t.n - t.m)
}

/// `C(2n + delta, n - m) = C(2n + l, n - k)`, exactly.
pub fn check_eq12(t: &ParamTuple) -> bool {
    if !t.in_range() {
        return false;
    }
    let (x, a, y, b) = from_param(t);
    if a.min(x - a).max(b.min(y - b)) <= DIRECT_BINOMIAL_MAX || t.m > t.k {
        return binomial(y as u64, b) == binomial(x as u64, a);
    }
    // both sides divided by the common factors:
    // prod_{i=m}^{k-1} (n-i) * prod_{i=delta+1}^{l} (2n+i) = prod_{i=m+delta+1}^{k+l} (n+i)
    let prod = |lo: i64, hi: i64, f: &dyn Fn(i64) -> i64| -> Natural {
        (lo..=hi).fold(Natural::one(), |acc, i| acc * f(i) as u64)
    };
    let (n, m, k, l, d) = (t.n, t.m, t.k, t.l, t.delta);
    prod(m, k - 1, &|i| n - i) * prod(d + 1, l, &|i| 2 * n + i) == prod(m + d + 1, k + l, &|i| n + i)
}

/// Largest binomial index multiplied out directly by [`check_eq12`].
const DIRECT_BINOMIAL_MAX: i64 = 4096;

/// Parameter tuples of every pair of representations of `rec` (higher row
/// first).
pub fn record_params(rec: &CollisionRecord) -> Vec<ParamTuple> {
    let mut out = Vec::new();
    for (i, hi) in rec.reps.iter().enumerate() {
        for lo in &rec.reps[i + 1..] {
            if let Ok(t) = to_param(hi.x, hi.a, lo.x, lo.a) {
                out.push(t);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(x: u64, a: u64) -> Representation {
        Representation { x, a }
    }

    #[test]
    fn collisions_below_25000() {
        let recs = enumerate_collisions(&Natural::from(25_000u32)).unwrap();
        let values: Vec<u64> = recs.iter().map(|r| r.n.to_u64().unwrap()).collect();
        assert_eq!(values, vec![120, 210, 1540, 3003, 7140, 11628, 24310]);
        let triple = &recs[3];
        assert_eq!(triple.reps, vec![rep(78, 2), rep(15, 5), rep(14, 6)]);
        assert_eq!(recs[0].reps, vec![rep(16, 2), rep(10, 3)]);
        assert!(recs.iter().all(CollisionRecord::verify));
    }

    #[test]
    fn small_bounds() {
        assert!(enumerate_collisions(&Natural::from(100u32)).unwrap().is_empty());
        let r = enumerate_collisions(&Natural::from(120u32)).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].reps, vec![rep(16, 2), rep(10, 3)]);
        assert!(enumerate_collisions(&Natural::from(5u32)).is_err());
    }

    #[test]
    fn row_bounded_search_agrees_with_value_bounded() {
        let by_row = collisions_below_row(60);
        let by_value = enumerate_collisions(&binomial(60, 30)).unwrap();
        // every row-bounded record appears with the same representations
        for r in &by_row {
            assert!(by_value.contains(r), "{:?}", r);
        }
        let expected: Vec<&CollisionRecord> =
            by_value.iter().filter(|r| r.reps.iter().any(|p| p.x <= 60)).collect();
        assert_eq!(expected.len(), by_row.len());
    }

    #[test]
    fn solve_row_inverts_binomial() {
        for a in 2..25u64 {
            for x in [2 * a, 2 * a + 1, 1000, 123_457] {
                let n = binomial(x, a as i64);
                assert_eq!(solve_row(&n, a), Some(x), "a={a} x={x}");
                assert_eq!(solve_row(&(n + 1u32), a), None);
            }
        }
    }

    #[test]
    fn jsonl_shape() {
        let recs = enumerate_collisions(&Natural::from(120u32)).unwrap();
        let mut buf = Vec::new();
        write_collisions_jsonl(&recs, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "{\"N\":\"120\",\"reps\":[[16,2],[10,3]]}\n");
    }

    #[test]
    fn fibonacci_family() {
        assert_eq!(fib_identity(1).unwrap(), FibMember { i: 1, x: 15, a: 5, y: 14, b: 6, verified: true });
        assert_eq!(fib_identity(0).unwrap(), FibMember { i: 0, x: 2, a: 0, y: 1, b: 1, verified: true });
        let m2 = fib_identity(2).unwrap();
        assert_eq!((m2.x, m2.a, m2.y, m2.b, m2.verified), (104, 39, 103, 40, true));
        for i in 0..=4 {
            assert!(fib_identity(i).unwrap().verified, "i = {i}");
        }
    }

    #[test]
    fn parametrization() {
        let t = to_param(15, 5, 14, 6).unwrap();
        assert_eq!(t, ParamTuple::new(0, 7, 1, 2, 1));
        let f = t.flags();
        assert!(f.all_but_size() && !f.n_large);
        assert_eq!((t.k0(), t.m0()), (5, 1));
        let u = to_param(21, 2, 10, 4).unwrap();
        assert_eq!(u, ParamTuple::new(0, 5, 1, 3, 11));
        assert!(!u.flags().ordered);
        assert_eq!(from_param(&u), (21, 2, 10, 4));
        assert!(to_param(10, 3, 16, 2).is_err());
    }

    #[test]
    fn eq12_examples() {
        assert!(check_eq12(&ParamTuple::new(0, 7, 1, 2, 1)));
        assert!(check_eq12(&ParamTuple::new(0, 5, 1, 3, 11)));
        assert!(!check_eq12(&ParamTuple::new(0, 7, 1, 2, 2)));
    }
}
