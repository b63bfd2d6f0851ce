//! Exact integer arithmetic: binomials, Fibonacci numbers, smooth parts,
//! largest prime factors, factorial valuations and log-factorials.

pub mod primality;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::bounds::ball::{Ball, MAX_DECIMAL_DIGITS};
use crate::bounds::Real;
use crate::sieve::small_primes;

pub use primality::{is_prime_big, is_prime_u128, is_prime_u64, next_prime_u64, prev_prime_u64};

/// Arbitrary-precision nonnegative integer.
pub type Natural = BigUint;

/// Odd trial divisors beyond the prime table are tried up to this bound.
pub const TRIAL_DIVISION_LIMIT: u64 = 1 << 24;

/// Bits per exact chunk product before one logarithm is taken.
const LOG_CHUNK_BITS: u64 = 4096;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("argument must be at least 2, got {0}")]
    BelowTwo(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("digits must lie in [15, {max}], got {got}")]
    Digits { got: u32, max: u32 },
    #[error("cofactor {0} has no factor below the trial-division limit and is composite")]
    Capability(String),
}

// ---------------------------------------------------------------------------
// binomials and Fibonacci numbers
// ---------------------------------------------------------------------------

/// `C(x, r)`, zero outside `0 <= r <= x`.
pub fn binomial(x: u64, r: i64) -> Natural {
    if r < 0 || r as u64 > x {
        return Natural::zero();
    }
    let r = (r as u64).min(x - r as u64);
    let mut acc = Natural::one();
    for i in 0..r {
        acc *= x - i;
        acc /= i + 1;
    }
    acc
}

/// `F_i` with `F_0 = 0`, `F_1 = 1`, by fast doubling.
pub fn fibonacci(i: u64) -> Natural {
    fn pair(i: u64) -> (Natural, Natural) {
        if i == 0 {
            return (Natural::zero(), Natural::one());
        }
        let (a, b) = pair(i / 2);
        // F_2k = F_k (2 F_{k+1} - F_k), F_{2k+1} = F_k^2 + F_{k+1}^2
        let c = &a * (&b * 2u32 - &a);
        let d = &a * &a + &b * &b;
        if i % 2 == 0 {
            (c, d)
        } else {
            let e = &c + &d;
            (d, e)
        }
    }
    pair(i).0
}

// ---------------------------------------------------------------------------
// smoothness
// ---------------------------------------------------------------------------

/// `base = cofactor * prod p^e` with every listed `p <= bound` and no prime
/// factor of `cofactor` at most `bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmoothFactorization {
    #[serde(serialize_with = "crate::util::ser_decimal")]
    pub base: Natural,
    pub bound: u64,
    pub factors: Vec<(u64, u32)>,
    #[serde(serialize_with = "crate::util::ser_decimal")]
    pub cofactor: Natural,
}

impl SmoothFactorization {
    pub fn is_smooth(&self) -> bool {
        self.cofactor.is_one()
    }

    pub fn smooth_part(&self) -> Natural {
        self.factors.iter().fold(Natural::one(), |acc, &(p, e)| acc * Natural::from(p).pow(e))
    }
}

enum Remaining {
    Small(u128),
    Big(Natural),
}

impl Remaining {
    fn new(v: &Natural) -> Remaining {
        match v.to_u128() {
            Some(s) => Remaining::Small(s),
            None => Remaining::Big(v.clone()),
        }
    }

    /// Strips every factor `p`; returns the multiplicity.
    fn strip(&mut self, p: u64) -> u32 {
        let mut e = 0;
        match self {
            Remaining::Small(v) => {
                while *v % p as u128 == 0 {
                    *v /= p as u128;
                    e += 1;
                }
            }
            Remaining::Big(v) => {
                loop {
                    let (q, r) = v.div_rem(&Natural::from(p));
                    if !r.is_zero() {
                        break;
                    }
                    *v = q;
                    e += 1;
                }
                if let Some(s) = v.to_u128() {
                    *self = Remaining::Small(s);
                }
            }
        }
        e
    }

    /// True when `p * p > remaining`.
    fn below_square(&self, p: u64) -> bool {
        match self {
            Remaining::Small(v) => (p as u128) * (p as u128) > *v,
            Remaining::Big(_) => false,
        }
    }

    fn is_one(&self) -> bool {
        matches!(self, Remaining::Small(1))
    }

    fn to_natural(&self) -> Natural {
        match self {
            Remaining::Small(v) => Natural::from(*v),
            Remaining::Big(v) => v.clone(),
        }
    }
}

/// Splits `nu` into its `bound`-smooth part and the cofactor by trial division.
pub fn smooth_split(nu: &Natural, bound: u64) -> Result<SmoothFactorization, ArithError> {
    if *nu < Natural::from(2u32) {
        return Err(ArithError::BelowTwo(nu.to_string()));
    }
    if bound < 2 {
        return Err(ArithError::BelowTwo(bound.to_string()));
    }
    let mut rem = Remaining::new(nu);
    let mut factors = Vec::new();
    let table = small_primes();
    let mut exhausted = true;
    for &p in table {
        let p = p as u64;
        if p > bound {
            exhausted = false;
            break;
        }
        if rem.is_one() {
            exhausted = false;
            break;
        }
        if rem.below_square(p) {
            // the remaining value is 1 or prime
            if let Remaining::Small(v) = rem {
                if v <= bound as u128 {
                    factors.push((v as u64, 1));
                    rem = Remaining::Small(1);
                }
            }
            exhausted = false;
            break;
        }
        let e = rem.strip(p);
        if e > 0 {
            factors.push((p, e));
        }
    }
    if exhausted && bound > *table.last().unwrap() as u64 && !rem.is_one() {
        // primes between the table and the bound: odd trial divisors
        let mut d = *table.last().unwrap() as u64 + 2;
        while d <= bound && !rem.is_one() {
            if rem.below_square(d) {
                if let Remaining::Small(v) = rem {
                    if v <= bound as u128 {
                        factors.push((v as u64, 1));
                        rem = Remaining::Small(1);
                    }
                }
                break;
            }
            if d > TRIAL_DIVISION_LIMIT {
                return Err(ArithError::Capability(rem.to_natural().to_string()));
            }
            let e = rem.strip(d);
            if e > 0 {
                factors.push((d, e));
            }
            d += 2;
        }
    }
    factors.sort_unstable();
    Ok(SmoothFactorization { base: nu.clone(), bound, factors, cofactor: rem.to_natural() })
}

/// `P(nu)`, the largest prime factor.
pub fn largest_prime_factor(nu: &Natural) -> Result<Natural, ArithError> {
    if *nu < Natural::from(2u32) {
        return Err(ArithError::BelowTwo(nu.to_string()));
    }
    let mut rem = Remaining::new(nu);
    let mut largest = 1u64;
    let mut d_iter = small_primes().iter().map(|&p| p as u64).chain(
        ((*small_primes().last().unwrap() as u64 + 2)..=TRIAL_DIVISION_LIMIT).step_by(2),
    );
    let mut changed = true;
    loop {
        if rem.is_one() {
            return Ok(Natural::from(largest));
        }
        if changed {
            let rest = rem.to_natural();
            if is_prime_big(&rest) {
                return Ok(rest.max(Natural::from(largest)));
            }
            changed = false;
        }
        let Some(d) = d_iter.next() else {
            return Err(ArithError::Capability(rem.to_natural().to_string()));
        };
        // a composite remainder always has a factor below its square root
        debug_assert!(!rem.below_square(d));
        if rem.strip(d) > 0 {
            largest = d;
            changed = true;
        }
    }
}

/// `v_p(nu!) = sum_{a >= 1} floor(nu / p^a)`.
pub fn legendre_valuation(p: u64, nu: u64) -> Result<u64, ArithError> {
    if !is_prime_u64(p) {
        return Err(ArithError::NotPrime(p));
    }
    let mut total = 0;
    let mut q = nu / p;
    while q > 0 {
        total += q;
        q /= p;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// log-factorials
// ---------------------------------------------------------------------------

/// `sum log(i)` over `i in range`, one ball logarithm per chunk of exact
/// product.
fn log_product(range: std::ops::RangeInclusive<u64>) -> Ball {
    let mut total = Ball::exact_int(0);
    let mut chunk = Natural::one();
    for i in range {
        if i <= 1 {
            continue;
        }
        chunk *= i;
        if chunk.bits() >= LOG_CHUNK_BITS {
            total = total + Ball::from_bigint(&BigInt::from(std::mem::replace(&mut chunk, Natural::one()))).ln();
        }
    }
    if !chunk.is_one() {
        total = total + Ball::from_bigint(&BigInt::from(chunk)).ln();
    }
    total
}

fn check_digits(digits: u32) -> Result<(), ArithError> {
    if !(15..=MAX_DECIMAL_DIGITS).contains(&digits) {
        return Err(ArithError::Digits { got: digits, max: MAX_DECIMAL_DIGITS });
    }
    Ok(())
}

/// `log(nu!)` as a ball whose radius certifies `digits` significant decimals.
pub fn log_factorial_exact(nu: u64, digits: u32) -> Result<Ball, ArithError> {
    check_digits(digits)?;
    Ok(log_product(2..=nu))
}

/// `log C(x, r)` for `0 <= r <= x`.
pub fn log_binomial_exact(x: u64, r: u64, digits: u32) -> Result<Ball, ArithError> {
    check_digits(digits)?;
    assert!(r <= x, "log_binomial_exact needs r <= x");
    let r = r.min(x - r);
    Ok(log_product(x - r + 1..=x) - log_product(2..=r))
}
