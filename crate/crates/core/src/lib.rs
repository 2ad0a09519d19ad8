//! Minimal and near-minimal cubature rules and Lagrange interpolation on the
//! square `[-1, 1]^2`.
//!
//! The crate builds explicit node families for Chebyshev-type weights,
//! computes their weights from reproducing kernels, verifies the degree of
//! exactness against a tensor-Gauss moment oracle, and searches numerically
//! for minimal rules of the constant weight.

pub mod basis2d;
pub mod cubature;
pub mod discover;
pub mod error;
pub mod interp;
pub mod nodes;
pub mod poly;
pub mod rulefile;
pub mod univariate;
pub mod weights;

pub use error::{Error, Result};
