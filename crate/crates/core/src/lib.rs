//! Exact q-series arithmetic for theta functions, Appell functions and
//! Hecke-type double sums, with a registry of identities that are checked
//! coefficient by coefficient up to a chosen truncation order.
//!
//! Everything is exact: exponents are rationals, coefficients are integer
//! Laurent polynomials in up to four formal variables. A generic variable `x`
//! is specialized as `q^alpha * x` with a small rational weight `alpha`, which
//! fixes the expansion direction of every geometric denominator.

pub mod appell;
pub mod blocks;
pub mod cyclo;
pub mod error;
pub mod family;
pub mod format;
pub mod hecke;
pub mod int;
pub mod qring;
pub mod report;
pub mod verify;
mod window;

pub use error::{Error, Result};
pub use int::Int;
pub use qring::{FormalVar, LaurentCoeff, QExp, QSeries, VarExp, WeightedMonomial};
