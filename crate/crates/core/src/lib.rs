//! Garner's algebraic small object argument, executed on finite presheaf
//! categories.
//!
//! The crate builds one-step factorisations from a set of generating maps,
//! runs the free-monad sequence (and Quillen's classical sequence) pointwise
//! at a map, extracts algebra structures and lifting tables, and checks the
//! axioms of natural weak factorisation systems for hand-written rules.

pub mod algebra;
pub mod arrow;
pub mod catalog;
pub mod certificate;
pub mod colimit;
pub mod error;
pub mod io;
pub mod laws;
pub mod onestep;
pub mod presheaf;
pub mod sequence;

pub use error::{Error, Result};
