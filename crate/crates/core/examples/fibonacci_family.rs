//! The infinite family C(F_{2i+2}F_{2i+3}, F_{2i}F_{2i+3}) =
//! C(F_{2i+2}F_{2i+3} - 1, F_{2i}F_{2i+3} + 1).

use binocoll::collision::fib_identity;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for i in 0..8 {
        let m = fib_identity(i)?;
        println!(
            "i={i}: C({}, {}) = C({}, {})  {}",
            m.x,
            m.a,
            m.y,
            m.b,
            if m.verified { "verified exactly" } else { "row too large to multiply out" }
        );
    }
    Ok(())
}
