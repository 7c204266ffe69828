//! Exact computations around the adjoint action of `GL_n` on `gl_n` and the
//! stabilizer `P` of a nonzero vector.
//!
//! Everything runs over the rationals. The modules build on each other:
//!
//! * [`ratlin`]: rationals, dense matrices, univariate and multivariate polynomials,
//!   exact elimination.
//! * [`lie`]: brackets, the trace form, stabilizer algebras and centralizers.
//! * [`jordan`]: nilpotency and semisimplicity tests, additive Jordan
//!   decomposition, nilpotent partitions.
//! * [`orbit`]: Krylov dimension `d(X, v)`, the determinant `Σ`, `P`-orbits of
//!   regular nilpotents, stratum signatures, sections and genericity tests.
//! * [`charvar`]: membership in the conormal-type varieties and fiber computations.
//! * [`weyl`]: the Weyl algebra, principal symbols, Poisson brackets, V-degrees.
//! * [`cli`]: sampling harness and JSON reports behind the `glorbit` binary.

pub mod charvar;
pub mod cli;
pub mod error;
pub mod jordan;
pub mod lie;
pub mod orbit;
pub mod ratlin;
pub mod sample;
pub mod weyl;

pub use error::{Error, Result};
