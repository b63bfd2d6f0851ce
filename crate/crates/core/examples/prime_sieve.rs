//! Segmented sieve: prime streams, Chebyshev sums, neighbours and gaps.

use binocoll::sieve::{chebyshev_exact, gap_scan_with, prime_neighbors, primes_in, ScanOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let first: Vec<u64> = primes_in(1_000_000_000, 1_000_000_200)?.collect();
    println!("primes in [1e9, 1e9+200]: {first:?}");
    let c = chebyshev_exact(1_000_000)?;
    println!("pi(1e6) = {}, theta = {:.6}, psi = {:.6} (+-{:.1e})", c.pi, c.theta, c.psi, c.abs_error);
    println!("neighbours of 10^12: {:?}", prime_neighbors(1_000_000_000_000)?);
    let gaps = gap_scan_with(2, 1_000_000_000, 250, ScanOptions { threads: 0, ..ScanOptions::default() })?;
    println!("gaps of 250 or more below 1e9:");
    for g in gaps {
        println!("  {} -> {} (gap {})", g.p, g.p + g.gap, g.gap);
    }
    Ok(())
}
