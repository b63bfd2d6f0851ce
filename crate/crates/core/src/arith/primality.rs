//! Deterministic primality tests for 64- and 128-bit integers.
//!
//! `u64` inputs use Miller-Rabin with the first twelve prime bases, which is
//! exact over the whole range. Wider inputs use Miller-Rabin with the first
//! thirteen prime bases (exact below 3.317e24) followed by a strong Lucas
//! test, i.e. Baillie-PSW.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

const MR_BASES_U64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
const MR_BASES_WIDE: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Upper limit below which the thirteen-base Miller-Rabin test is exact.
const MR13_EXACT_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES_U64 {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES_U64 {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_prime_u128(n: u128) -> bool {
    if let Ok(small) = u64::try_from(n) {
        return is_prime_u64(small);
    }
    let big = BigUint::from(n);
    for &p in &MR_BASES_WIDE {
        if n % p as u128 == 0 {
            return false;
        }
    }
    if !miller_rabin_big(&big, &MR_BASES_WIDE) {
        return false;
    }
    if n < MR13_EXACT_LIMIT {
        return true;
    }
    strong_lucas_probable_prime(&big)
}

/// Primality for arbitrary naturals. Values beyond 128 bits are only needed
/// by callers that already know the value is small; they get Baillie-PSW.
pub fn is_prime_big(n: &BigUint) -> bool {
    match n.to_u128() {
        Some(v) => is_prime_u128(v),
        None => {
            for &p in &MR_BASES_WIDE {
                if (n % p).is_zero() {
                    return false;
                }
            }
            miller_rabin_big(n, &MR_BASES_WIDE) && strong_lucas_probable_prime(n)
        }
    }
}

fn miller_rabin_big(n: &BigUint, bases: &[u64]) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in bases {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Jacobi symbol (a / n) for odd positive n.
fn jacobi(a: &BigInt, n: &BigUint) -> i32 {
    let n_int = BigInt::from_biguint(Sign::Plus, n.clone());
    let mut a = a.mod_floor(&n_int).to_biguint().expect("nonnegative after mod_floor");
    let mut n = n.clone();
    let mut result = 1;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        let n_mod_8 = (&n % 8u32).to_u32().unwrap();
        if tz % 2 == 1 && (n_mod_8 == 3 || n_mod_8 == 5) {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u32().unwrap() == 3 && (&n % 4u32).to_u32().unwrap() == 3 {
            result = -result;
        }
        a %= &n;
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

fn is_perfect_square(n: &BigUint) -> bool {
    let r = n.sqrt();
    &r * &r == *n
}

/// Strong Lucas probable-prime test with Selfridge's parameter choice.
fn strong_lucas_probable_prime(n: &BigUint) -> bool {
    if is_perfect_square(n) {
        return false;
    }
    let n_int = BigInt::from_biguint(Sign::Plus, n.clone());
    // D = 5, -7, 9, -11, ... until (D/n) = -1
    let mut d = BigInt::from(5);
    loop {
        match jacobi(&d, n) {
            -1 => break,
            0 => {
                if d.abs() != n_int {
                    return false;
                }
            }
            _ => {}
        }
        d = if d.is_positive() { -(d + 2i32) } else { -(d - 2i32) };
    }
    let p = BigInt::one();
    let q = (BigInt::one() - &d) / 4;

    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let dd = &n_plus_1 >> s;

    let modn = |v: BigInt| v.mod_floor(&n_int);
    let half = |v: BigInt| {
        let v = if v.is_odd() { v + &n_int } else { v };
        modn(v >> 1)
    };

    // Binary ladder computing U_dd, V_dd, Q^dd.
    let mut u = BigInt::zero();
    let mut v = BigInt::from(2);
    let mut qk = BigInt::one();
    let bits = dd.bits();
    for i in (0..bits).rev() {
        // double
        u = modn(&u * &v);
        v = modn(&v * &v - 2 * &qk);
        qk = modn(&qk * &qk);
        if dd.bit(i) {
            let u_new = half(&p * &u + &v);
            let v_new = half(&d * &u + &p * &v);
            u = u_new;
            v = v_new;
            qk = modn(&qk * &q);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = modn(&v * &v - 2 * &qk);
        if v.is_zero() {
            return true;
        }
        qk = modn(&qk * &qk);
    }
    false
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime_u64(n: u64) -> Option<u64> {
    if n < 2 {
        return Some(2);
    }
    let mut c = if n % 2 == 0 { n.checked_add(1)? } else { n.checked_add(2)? };
    loop {
        if is_prime_u64(c) {
            return Some(c);
        }
        c = c.checked_add(2)?;
    }
}

/// Largest prime less than or equal to `n`, if any.
pub fn prev_prime_u64(n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    if n == 2 {
        return Some(2);
    }
    let mut c = if n % 2 == 0 { n - 1 } else { n };
    while c >= 3 {
        if is_prime_u64(c) {
            return Some(c);
        }
        c -= 2;
    }
    Some(2)
}
