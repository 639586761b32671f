//! Dynamical systems attached to elliptic curves over Q: p-adic
//! q-transformations, solenoids, β-transformations and their adelic
//! products, with heights, division polynomials and divisibility sequences.

pub mod adelic;
pub mod arith;
pub mod beta;
pub mod curve;
pub mod error;
pub mod heights;
pub mod padic;
pub mod poly;
pub mod roots;
pub mod sequences;
pub mod solenoid;

pub use error::{Error, Result};
