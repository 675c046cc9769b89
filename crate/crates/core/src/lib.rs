//! Multiplicative Diophantine exponents of points and hyperplanes.
//!
//! The crate estimates the standard, multiplicative and simultaneous
//! exponents of real vectors from explicit witnesses, builds reals with a
//! prescribed simultaneous exponent, and checks the lattice-flow and
//! exterior-algebra facts that tie those exponents to shortest vectors of
//! diagonally flowed unimodular lattices.

pub mod constructions;
pub mod correspondence;
pub mod error;
pub mod exterior;
pub mod hyperplane;
pub mod input;
pub mod lattice;
pub mod nondiv;
pub mod numerics;
pub mod witnesses;

pub use error::{Error, Result};
pub use numerics::{
    pi_plus, pi_plus_int, plus_abs, Exponent, IntVector, LogValue, PrecisionReal, RealVector, Scalar,
};
