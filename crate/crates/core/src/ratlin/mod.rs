//! Exact rational linear algebra.
//!
//! Scalars are [`Rational`] (`BigRational`, always reduced with a positive
//! denominator). Matrices act on column vectors.

mod elim;
mod matrix;
mod mpoly;
mod poly;
mod scalar;

pub use elim::{determinant, inverse, kernel_basis, rank, rref, solve, span_contains, Rref};
pub use matrix::{RatMatrix, RatVector};
pub use mpoly::MPoly;
pub use poly::RatPoly;
pub use scalar::{format_rational, parse_rational, rat, Rational};
