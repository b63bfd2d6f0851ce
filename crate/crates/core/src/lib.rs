//! Binomial-coefficient collisions, the explicit prime estimates used to
//! bound them, and the prime-gap smoothness certificate.

pub mod arith;
pub mod bounds;
pub mod certificate;
pub mod cli;
pub mod collision;
pub mod lemma;
pub mod sieve;
pub(crate) mod util;
