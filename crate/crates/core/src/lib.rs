//! Numerical checks of weighted Blaschke-type conditions for zeros of
//! holomorphic functions in Nevanlinna-type classes on the unit disc.
//!
//! The crate builds the smooth weight `φ` attached to a closed set `E` of the
//! unit circle, evaluates the class norms by quadrature, computes weighted
//! zero sums exactly, and checks the supporting identities and inequalities.

pub mod blaschke_verify;
pub mod boundary_set;
pub mod cli;
pub mod error;
pub mod function_zoo;
pub mod green_verify;
pub mod quadrature;
pub mod report;
pub mod scenario;
pub mod weight;

pub use error::{NevError, Result};
pub use report::Status;
