//! Exact arithmetic over Q_p with precision tracking, finite-level models of
//! measure algebras on profinite towers, locally constant function spaces and
//! their duality pairing, unitary lattice representations, induction in three
//! models, and the normalized LUP decomposition of GL_n(Q_p).
//!
//! Everything is computed at a finite level of a quotient tower and at a
//! finite p-adic working precision; all operations are pure and all values
//! are immutable after construction.

pub mod catalog;
pub mod error;
pub mod function;
pub mod gln;
pub mod induction;
pub mod matrix;
pub mod measure;
pub mod padic;
pub mod rep;
pub mod selftest;
pub mod tower;

pub use error::{Error, Result};
pub use matrix::PadicMatrix;
pub use padic::PadicNumber;
pub use tower::QuotientTower;
