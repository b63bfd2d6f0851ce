//! Sum-threshold crossover and the explicit bound on `n` from the
//! valuation inequality.

use std::time::Instant;

use binocoll::lemma::{max_n_from_valuation_bound, sum_threshold_crossover, NmaxGrid, PiMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = Instant::now();
    let c = sum_threshold_crossover()?;
    println!("last F with a nonnegative sum expression: {}", c.f_star);
    println!("  expression at F:   {}", c.at_f_star);
    println!("  expression at F+1: {}", c.after_f_star);
    println!("  ({:.2?})", t.elapsed());

    for mode in [PiMode::Dusart, PiMode::Exact] {
        let t = Instant::now();
        let grid = NmaxGrid { pi_mode: mode, threads: rayon::current_num_threads(), ..NmaxGrid::default() };
        let r = max_n_from_valuation_bound(&grid)?;
        println!(
            "{mode:?}: n <= {:.6e} (log(n-k) <= {:.4}) at k={}, l={}; {} points, {:.2?}",
            r.n_max,
            r.log_n_minus_k.hi(),
            r.argmax_k,
            r.argmax_l,
            r.points,
            t.elapsed()
        );
    }
    Ok(())
}
