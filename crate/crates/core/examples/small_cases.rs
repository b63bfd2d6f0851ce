//! The small-case contradiction, the product bounds for one tuple and the
//! large-l consistency check.

use binocoll::collision::ParamTuple;
use binocoll::lemma::{check_binomial_product_bounds, large_l_consistency, small_case_contradiction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for k in [1u64, 10, 100, 588, 100_000] {
        let c = small_case_contradiction(k)?;
        println!("k={k:<6} lower {} vs upper {}: contradiction {}", c.lhs, c.rhs, c.contradiction);
    }
    let t = ParamTuple::new(0, 1_000_000, 441, 600, 1);
    let r = check_binomial_product_bounds(&t)?;
    println!("product bounds at {t:?}: {} ({})", r.verdict, r.notes);

    let r = large_l_consistency(1_000_000_000, 0.68)?;
    println!(
        "n=1e9, c=0.68: l0 = {}, threshold {}, consistency {} < {}: {}",
        r.thresholds.t_pow, r.thresholds.t_log2, r.consistency.lhs, r.consistency.rhs, r.consistency.verdict
    );
    Ok(())
}
