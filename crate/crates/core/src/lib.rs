//! Certified upper bounds on the growth factor of Gaussian elimination with
//! complete pivoting.
//!
//! The crate is organised around five pieces:
//!
//! * [`ge`]: the elimination engine (complete/partial pivoting, iterates,
//!   growth factors, the partial-pivoting instability demo).
//! * [`det_bounds`]: determinant inequalities (Hadamard, singular-value sum
//!   bound, the low-rank Hadamard generalisation, the long-range pivot bound).
//! * [`lp`]: the Wilkinson, geometric-mean and improved linear programs, a
//!   floating point dual simplex solver and an exact rational certifier.
//! * [`asymptotics`]: closed forms and the numerical checks behind the
//!   asymptotic exponent.
//! * [`enclosure`]: rigorous rational enclosures of logarithms and square
//!   roots used wherever a bound has to be compared exactly.

pub mod asymptotics;
pub mod det_bounds;
pub mod enclosure;
pub mod error;
pub mod ge;
pub mod lp;
pub mod matrix;
pub mod scalar;
pub mod svd;

pub use error::{Error, Result};
pub use matrix::{AnyMatrix, Matrix, ScalarMode};
pub use scalar::{RealScalar, Scalar};
