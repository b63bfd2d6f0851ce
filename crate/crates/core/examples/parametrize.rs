//! Collisions in (delta, n, m, k, l) coordinates, with the exact product
//! identity beside the form with shifted index ranges.

use binocoll::collision::{check_eq12, collisions_below_row, record_params};
use binocoll::lemma::{
    printed_product_identity_holds, printed_ratio_identity_holds, product_identity_holds, ratio_identity_holds,
};

fn main() {
    for rec in collisions_below_row(60) {
        for t in record_params(&rec) {
            println!(
                "N={:<6} delta={} n={:<3} m={:<3} k={:<3} l={:<4} k0={:<4} m0={:<3} eq={} product={} ratio={} shifted product={} shifted ratio={}",
                rec.n.to_string(),
                t.delta,
                t.n,
                t.m,
                t.k,
                t.l,
                t.k0(),
                t.m0(),
                check_eq12(&t),
                product_identity_holds(&t),
                ratio_identity_holds(&t),
                printed_product_identity_holds(&t),
                printed_ratio_identity_holds(&t),
            );
        }
    }
}
