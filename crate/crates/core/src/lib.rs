//! Gauss-skizze of complex polynomials.
//!
//! The skizze of a monic polynomial `P` of degree `n` is the bi-colored
//! forest `Re P = 0` (blue) and `Im P = 0` (red). This crate traces it
//! numerically, encodes its combinatorial type, builds the poset of types
//! under Whitehead moves, follows types along deformation paths and checks
//! operadic composition of root configurations.

pub mod deform;
pub mod error;
pub mod frobenius;
pub mod graph;
pub mod operad;
pub mod poly;
pub mod poset;
pub mod tracer;

pub use error::{Error, Result};
pub use poly::{Complex, Polynomial};
