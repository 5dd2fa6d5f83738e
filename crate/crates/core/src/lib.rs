//! First Dirichlet eigenvalues of regular polygons and of mixed right
//! triangles, with the geometric and spectral checks built on them.

// `!(x > 0.0)` is used on purpose to reject NaN together with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod cli;
pub mod deriv;
pub mod dissect;
pub mod dump;
pub mod error;
pub mod femeig;
pub mod geometry;
pub mod mesh;
pub mod sparse;
pub mod triangle;
pub mod verify;

pub use error::{Error, Result};

/// Error-budget rule: `a < b` is accepted when the gap exceeds three times
/// the combined error estimates. Arguments are `(value, error_estimate)`.
pub fn certified_less(a: (f64, f64), b: (f64, f64)) -> bool {
    b.0 - a.0 > 3.0 * (a.1 + b.1)
}
