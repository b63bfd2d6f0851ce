//! Desk-scale run of the prime-gap smoothness certificate.
//!
//! `cargo run --release --example certificate -- [q_max] [threads]`

use binocoll::certificate::{coverage_check, run, CertificateConfig, DEFAULT_WINDOWS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let q_max = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100_000_000);
    let threads = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);

    let coverage = coverage_check(456, 156, &DEFAULT_WINDOWS);
    for r in coverage.runs() {
        println!("placements {:>3}..={:<3} covered by {:?}", r.from, r.to, r.window);
    }

    let config = CertificateConfig { q_max, threads, ..CertificateConfig::default() };
    let report = run(&config)?;
    println!(
        "q <= {q_max}: {} primes, {} with gap >= {}, largest gap {:?}",
        report.prime_count, report.gap_prime_count, config.gap_min, report.largest_gap
    );
    for w in &report.windows {
        println!("window {:?}: {} refuted", w.window, w.refuted);
    }
    println!("failures: {}, certified: {} ({:.2?})", report.failures.len(), report.certified, report.wall_time);
    Ok(())
}
