//! Repeated binomial coefficients: every value up to a bound, then a row
//! scan deep enough to reach the six-fold value's neighbour C(104, 39).
//!
//! `cargo run --release --example collision_search -- [max_value] [max_row]`

use binocoll::arith::Natural;
use binocoll::collision::{collisions_below_row, enumerate_collisions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let max_value: Natural = args.next().unwrap_or_else(|| "25000".into()).parse()?;
    let max_row: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(120);

    println!("values <= {max_value}:");
    for rec in enumerate_collisions(&max_value)? {
        let reps: Vec<String> = rec.reps.iter().map(|r| format!("C({},{})", r.x, r.a)).collect();
        println!("  {:>8} = {}", rec.n, reps.join(" = "));
    }

    println!("values occurring in rows <= {max_row}:");
    for rec in collisions_below_row(max_row) {
        assert!(rec.verify());
        let reps: Vec<String> = rec.reps.iter().map(|r| format!("C({},{})", r.x, r.a)).collect();
        println!("  {} = {}", rec.n, reps.join(" = "));
    }
    Ok(())
}
