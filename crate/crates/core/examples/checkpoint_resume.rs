//! Interrupting the certificate run and resuming from its checkpoint gives
//! the same report as an uninterrupted run.

use binocoll::certificate::{run, run_with, CertificateConfig, RunControl};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("binocoll-resume-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("checkpoint.json");
    let config = CertificateConfig {
        q_max: 50_000_000,
        segment_size: 1 << 14,
        checkpoint_path: Some(path.clone()),
        ..CertificateConfig::default()
    };

    let partial = run_with(&config, RunControl { stop_after_segments: Some(40), on_gap: None })?;
    println!("stopped after {}/{} segments, {} gap primes so far", partial.segments_done, partial.segments_total, partial.gap_prime_count);
    let resumed = run(&config)?;
    let fresh = run(&CertificateConfig { checkpoint_path: None, ..config.clone() })?;
    let a = serde_json::to_string(&resumed)?;
    let b = serde_json::to_string(&fresh)?;
    println!("resumed report identical to uninterrupted run: {}", a == b);
    println!("gap primes {}, certified {}", resumed.gap_prime_count, resumed.certified);

    let other = CertificateConfig { gap_min: 200, ..config };
    match run(&other) {
        Err(e) => println!("changed configuration rejected: {e}"),
        Ok(_) => println!("unexpected: changed configuration accepted"),
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
