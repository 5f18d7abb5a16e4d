//! Exponential sums over the roots of reducible polynomials modulo every
//! `n <= x`, with the number-theoretic machinery used to check their main
//! terms, exact identities and bounds.

pub mod analysis;
pub mod arith;
pub mod charsums;
pub mod constants;
pub mod expsums;
pub mod gauss;
pub mod roots;
pub mod sieve;
pub mod vdc;
