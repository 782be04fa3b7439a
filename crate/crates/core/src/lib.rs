//! Bernstein and AKR operators on [0, 1] and [0, 1]², with error bounds, class tests and limit probes.
//!
//! The crate evaluates the classical Bernstein operator `B_n`, the AKR
//! operator `B_{n,j}` (which fixes `1` and `x^j`) and their tensor products,
//! and provides the machinery to compare them: function-class membership
//! tests, closed-form error bounds, Voronovskaja limit probes and the
//! inequality chains `f ≤ B_{n,j}f ≤ B_n f`.

pub mod bounds;
pub mod calculus;
pub mod catalog;
pub mod classes;
pub mod error;
pub mod experiments;
pub mod operators;
pub mod table;
pub mod voronovskaja;

pub use error::{Error, ErrorKind, Result};
