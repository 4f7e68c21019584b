//! Galois lines of linearly normal elliptic quartic curves in P³.
//!
//! A smooth elliptic curve `y² = 4(x−e₁)(x−e₂)(x−e₃)` embedded by `|4P₀|`
//! as `(1 : x² : x : y)` is the base locus of the pencil spanned by
//! `XY − Z²` and `4YZ + pXZ + qX² − W²`. This crate computes every line
//! whose projection makes the curve a Galois cover of P¹, attaches exact
//! certificates where the data is rational and numeric ones otherwise, and
//! reports how the lines meet.

pub mod error;
pub mod exact;
pub mod projective;
pub mod curve;
pub mod function_field;
pub mod torus;
pub mod numeric;
pub mod galois;
pub mod projection;
pub mod monodromy;
pub mod cli;

pub use error::{Error, Result};
