//! Primary ideals in orders of quadratic number fields and the
//! factorization invariants of their monoids.

pub mod arith;
pub mod cli;
pub mod error;
pub mod factor_engine;
pub mod global_monoid;
pub mod lattice;
pub mod local_monoid;
pub mod order;

pub use error::{Error, Result};
