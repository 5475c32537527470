//! Exact-arithmetic toolkit for positivity certificates on basic closed
//! semialgebraic sets: sparse rational polynomials, exact linear
//! programming, polyhedral cone decomposition, certificate search,
//! boundary-positivity checkers, and refutation witnesses.

pub mod cone;
pub mod checkers;
pub mod lp;
pub mod matrix;
pub mod poly;
pub mod problem;
pub mod rays;
pub mod report;
pub mod witness;
