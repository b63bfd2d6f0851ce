//! Deciding an inequality soundly: binary64 intervals first, balls when the
//! intervals overlap.

use binocoll::bounds::{decide, decide_high_precision, Inequality, Real, Relation};

/// `exp(pi sqrt(163)) < 262537412640768744`, true by about 7.5e-13.
struct Ramanujan;

impl Inequality for Ramanujan {
    fn relation(&self) -> Relation {
        Relation::Lt
    }
    fn sides<R: Real>(&self) -> (R, R) {
        ((R::pi() * R::int(163).sqrt()).exp(), R::decimal("262537412640768744"))
    }
}

/// `log 2 + log 3 >= log 6`, true with equality.
struct Equality;

impl Inequality for Equality {
    fn relation(&self) -> Relation {
        Relation::Ge
    }
    fn sides<R: Real>(&self) -> (R, R) {
        (R::int(2).ln() + R::int(3).ln(), R::int(6).ln())
    }
}

fn main() {
    let d = decide(&Ramanujan);
    println!("exp(pi sqrt 163) < 262537412640768744: {} via {:?}", d.verdict.kind, d.precision);
    println!("  lhs {}\n  rhs {}", d.lhs, d.rhs);
    let d = decide_high_precision(&Ramanujan);
    println!("  ball tier alone: {}", d.verdict.kind);
    let d = decide(&Equality);
    println!("log 2 + log 3 >= log 6: {} (exact ties stay undecided)", d.verdict.kind);
}
