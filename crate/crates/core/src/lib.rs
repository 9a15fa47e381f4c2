//! Higher Hasse-Witt matrices of Laurent polynomials.
//!
//! The crate computes the matrices of coefficients of `x^(m v - u)` in `f^(m-1)`
//! indexed by lattice points of the Newton polytope, checks the p-adic congruences
//! they satisfy, evaluates their p-adic limits, builds the associated formal group
//! laws and compares unit roots of zeta functions with point counts.

pub mod budget;
pub mod corpus;
pub mod error;
pub mod fgl;
pub mod hwmatrix;
pub mod laurent;
pub mod ring;
pub mod series;
pub mod zeta;

pub use budget::Budget;
pub use error::{Error, Result};
