//! Polynomials over the naturals and the syntactic cost bounds.

mod bound;
mod poly;

pub use bound::{env_poly, term_poly, value_poly, verify_bound, BoundReport, BoundRow};
pub use poly::CostPoly;

#[cfg(test)]
mod tests;
