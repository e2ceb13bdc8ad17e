//! Directional normal cones and subdifferentials at infinity.
//!
//! Exact computations for H-polyhedra, sampling estimators for a small
//! grammar of nonsmooth functions, and certificates built on both.

pub mod asymptotics;
pub mod certificates;
pub mod error;
pub mod func;
pub mod geometry;
pub mod linalg;
pub mod oracle;
pub mod poly_infinity;
pub mod reproduce;

pub use error::{Error, Result};
