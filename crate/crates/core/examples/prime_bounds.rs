//! Explicit estimates as outward-rounded intervals: Dusart's pi(x) bound,
//! Robbins' factorial bounds, the linear psi bound and the entropy rate.

use binocoll::bounds::{
    central_binom_lower, decide, dusart_interval, f_plus, h_rate, log_binom_lowers, pi_upper_dusart,
    psi_upper_linear, stirling_log_bounds, CentralRateCheck, CriticalConstantCheck, HRateFloor, PsiConstantCheck,
};
use binocoll::sieve::chebyshev_exact;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for x in [100u64, 10_000, 1_742_310, 100_000_000] {
        let c = chebyshev_exact(x)?;
        println!("pi({x}) = {:<9} <= {}   psi = {:.3} <= {}", c.pi, pi_upper_dusart(x as f64)?, c.psi, psi_upper_linear(x as f64)?);
    }
    for nu in [2u64, 10, 500] {
        let s = stirling_log_bounds(nu)?;
        println!("log {nu}! in ({}, {})", s.log_g_minus, s.log_g_plus);
    }
    println!("f(1000.5) = {}", f_plus(1000.5)?);
    let w = dusart_interval(2e9)?;
    println!("a prime lies in (2e9, {}], length {}", w.hi, w.length());
    println!("h(0.00151, 0) = {}", h_rate(0.00151, 0.0)?);
    let lb = log_binom_lowers(0.001, 0.002, 1_000_000)?;
    println!("log-binomial lower bounds at (0.001, 0.002, 1e6): {} and {}", lb.first, lb.second);
    println!("central lower bound at n = 1e6: {}", central_binom_lower(1_000_000)?);
    println!("1.03883 < log 2.83: {}", decide(&PsiConstantCheck).verdict.kind);
    println!("h(0.00151, 0) > 4.6623: {}", decide(&HRateFloor).verdict.kind);
    println!("central rate >= 1.3132: {}", decide(&CentralRateCheck).verdict.kind);
    println!("1.3132 * 21/40 rounds to 0.68943: {}", decide(&CriticalConstantCheck).verdict.kind);
    Ok(())
}
