//! Lemma checkers run on every collision in rows up to 500 and on the
//! boundary cases of the small-k forcing argument.

use binocoll::bounds::VerdictKind;
use binocoll::collision::{collisions_below_row, record_params};
use binocoll::lemma::{
    check_log_ratio_bounds, check_small_k_forcing, check_valuation_bound, check_window_smoothness, PiMode,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for rec in collisions_below_row(500) {
        for t in record_params(&rec) {
            let verdicts = [
                check_log_ratio_bounds(&t).verdict,
                check_window_smoothness(&t)?.verdict,
                check_valuation_bound(&t, PiMode::Exact)?.verdict,
            ];
            let show = |v: VerdictKind| v.as_str().chars().next().unwrap_or('?');
            println!(
                "N={:<30} (delta,n,m,k,l)=({},{},{},{},{})  log-ratio {}  smoothness {}  valuation {}",
                rec.n.to_string(),
                t.delta,
                t.n,
                t.m,
                t.k,
                t.l,
                show(verdicts[0]),
                show(verdicts[1]),
                show(verdicts[2]),
            );
        }
    }
    for (n, k) in [(500_000u64, 587u64), (500_000, 588), (1_000_000_000, 587)] {
        let r = check_small_k_forcing(n, k);
        println!("forcing at n={n}, k={k}: quantity {} -> {}", r.lhs, r.verdict);
    }
    Ok(())
}
