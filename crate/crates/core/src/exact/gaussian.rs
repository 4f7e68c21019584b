use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::{Field, Scalar};

/// Element `re + im·i` of the Gaussian rationals ℚ(i).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussRat {
    pub re: Scalar,
    pub im: Scalar,
}

impl GaussRat {
    pub fn new(re: Scalar, im: Scalar) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: Scalar) -> Self {
        GaussRat {
            re,
            im: Scalar::zero(),
        }
    }

    pub fn i() -> Self {
        GaussRat {
            re: Scalar::zero(),
            im: Scalar::one(),
        }
    }

    pub fn conj(&self) -> Self {
        GaussRat {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn norm(&self) -> Scalar {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// Componentwise continued-fraction recovery of a numeric value.
    pub fn approximate(z: Complex64, max_den: u64) -> Option<GaussRat> {
        Some(GaussRat {
            re: Scalar::approximate(z.re, max_den)?,
            im: Scalar::approximate(z.im, max_den)?,
        })
    }
}

impl From<Scalar> for GaussRat {
    fn from(s: Scalar) -> Self {
        GaussRat::real(s)
    }
}

impl Field for GaussRat {
    fn zero() -> Self {
        GaussRat::real(Scalar::zero())
    }
    fn one() -> Self {
        GaussRat::real(Scalar::one())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: GaussRat) -> GaussRat {
        GaussRat::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: GaussRat) -> GaussRat {
        GaussRat::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: GaussRat) -> GaussRat {
        GaussRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for GaussRat {
    type Output = GaussRat;
    fn div(self, rhs: GaussRat) -> GaussRat {
        let n = rhs.norm();
        let p = self * rhs.conj();
        GaussRat::new(&p.re / &n, &p.im / &n)
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re, -self.im)
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) if self.im.is_negative() => {
                write!(f, "{}-{}i", self.re, self.im.abs())
            }
            (false, false) => write!(f, "{}+{}i", self.re, self.im),
        }
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for GaussRat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_squared_is_minus_one() {
        let i = GaussRat::i();
        assert_eq!(i.clone() * i, -GaussRat::one());
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = GaussRat::new(Scalar::new(3, 2), Scalar::from_int(-2));
        let b = GaussRat::new(Scalar::from_int(1), Scalar::new(1, 3));
        assert_eq!((a.clone() * b.clone()) / b, a);
    }

    #[test]
    fn display() {
        assert_eq!(GaussRat::new(Scalar::from_int(1), Scalar::new(-1, 2)).to_string(), "1-1/2i");
        assert_eq!(GaussRat::i().to_string(), "1i");
    }
}
