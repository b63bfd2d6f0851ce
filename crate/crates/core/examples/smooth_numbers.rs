//! Exact integer tools: smooth splitting, largest prime factors, Legendre
//! valuations and certified log-factorials.

use binocoll::arith::{
    binomial, largest_prime_factor, legendre_valuation, log_binomial_exact, log_factorial_exact, smooth_split, Natural,
};
use binocoll::bounds::Real;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = binomial(104, 39);
    println!("C(104, 39) = {n}");
    let s = smooth_split(&n, 50)?;
    println!("  50-smooth part factors {:?}, cofactor {}", s.factors, s.cofactor);
    println!("  largest prime factor {}", largest_prime_factor(&n)?);

    let mersenne = (Natural::from(1u32) << 89usize) - 1u32;
    println!("largest prime factor of 12 (2^89 - 1) = {}", largest_prime_factor(&(mersenne * 12u32))?);

    for p in [2u64, 3, 5, 7] {
        println!("v_{p}(1000!) = {}", legendre_valuation(p, 1000)?);
    }
    println!("log 1000! = {}", log_factorial_exact(1000, 30)?.enclosure());
    println!("log C(2e6, 735000) = {}", log_binomial_exact(2_000_000, 735_000, 30)?.enclosure());
    Ok(())
}
