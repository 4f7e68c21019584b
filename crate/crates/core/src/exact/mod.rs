//! Exact arithmetic: rationals, Gaussian rationals, dense univariate
//! polynomials, rational functions, resultants and small dense matrices.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub mod gaussian;
pub mod matrix;
pub mod poly;
pub mod ratfunc;
pub mod scalar;

pub use gaussian::GaussRat;
pub use matrix::Matrix;
pub use poly::{poly_resultant, Degree, Poly};
pub use ratfunc::{ratfunc_equals, RatFunc};
pub use scalar::Scalar;

/// A commutative field with exact equality.
pub trait Field:
    Clone
    + PartialEq
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
}
