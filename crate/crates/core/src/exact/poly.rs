//! Dense univariate polynomials over ℚ.
//!
//! Coefficients are stored lowest degree first. The zero polynomial has an
//! empty coefficient vector and degree [`Degree::NegInfinity`]; every other
//! polynomial has a nonzero last coefficient.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Scalar;
use crate::error::Error;

/// Degree of a polynomial; the zero polynomial has degree minus infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl PartialOrd for Degree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Degree {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Degree::NegInfinity, Degree::NegInfinity) => Ordering::Equal,
            (Degree::NegInfinity, _) => Ordering::Less,
            (_, Degree::NegInfinity) => Ordering::Greater,
            (Degree::Finite(a), Degree::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Scalar::from_int(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Poly::from_ints(&[0, 1])
    }

    /// `c·x^k`.
    pub fn monomial(c: Scalar, k: usize) -> Self {
        let mut coeffs = vec![Scalar::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    /// The monic linear polynomial `x - r`.
    pub fn linear_root(r: &Scalar) -> Self {
        Poly::new(vec![-r, Scalar::one()])
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn degree_or_zero(&self) -> usize {
        self.degree().finite().unwrap_or(0)
    }

    pub fn leading(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.leading().inv())
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(Scalar::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Scalar::from_int(k as i64))
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// Euclidean division: `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly), Error> {
        if d.is_zero() {
            return Err(Error::InvalidInput("polynomial division by zero".into()));
        }
        let dd = d.degree_or_zero();
        let lead_inv = d.leading().inv();
        let mut r = self.coeffs.clone();
        let mut q = vec![Scalar::zero(); r.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = r.last().unwrap() * &lead_inv;
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= &(&c * dc);
            }
            q[k] = c;
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Ok((Poly::new(q), Poly::new(r)))
    }

    /// Exact quotient; errors when the division leaves a remainder.
    pub fn div_exact(&self, d: &Poly) -> Result<Poly, Error> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(Error::InvalidInput(format!(
                "{self} is not divisible by {d}"
            )));
        }
        Ok(q)
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).expect("nonzero divisor").1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Substitute a polynomial for `x`.
    pub fn compose(&self, inner: &Poly) -> Poly {
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| &(&acc * inner) + &Poly::constant(c.clone()))
    }

    /// Primitive integer multiple: coefficients cleared of denominators.
    fn to_integer_coeffs(&self) -> (Vec<BigInt>, Scalar) {
        let l = Scalar::denominator_lcm(&self.coeffs);
        let scale = Scalar::from_bigint(l);
        let ints = self
            .coeffs
            .iter()
            .map(|c| (c * &scale).numer().clone())
            .collect();
        (ints, scale)
    }

    /// Text form `c*x^k + ...`, highest degree first, zero terms omitted.
    pub fn to_sparse_string(&self) -> String {
        self.to_string()
    }
}

/// Resultant of two polynomials, computed as the Sylvester determinant with
/// fraction-free (Bareiss) elimination over ℤ after clearing denominators.
///
/// If exactly one input is zero the resultant is zero.
pub fn poly_resultant(f: &Poly, g: &Poly) -> Result<Scalar, Error> {
    if f.is_zero() && g.is_zero() {
        return Err(Error::InvalidInput(
            "resultant of two zero polynomials".into(),
        ));
    }
    if f.is_zero() || g.is_zero() {
        return Ok(Scalar::zero());
    }
    let (m, n) = (f.degree_or_zero(), g.degree_or_zero());
    if m == 0 {
        return Ok(f.leading().pow(n as u32));
    }
    if n == 0 {
        return Ok(g.leading().pow(m as u32));
    }
    let (fi, cf) = f.to_integer_coeffs();
    let (gi, cg) = g.to_integer_coeffs();
    let size = m + n;
    let mut rows = vec![vec![BigInt::zero(); size]; size];
    // Highest coefficient first in each Sylvester row.
    for i in 0..n {
        for (j, c) in fi.iter().rev().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in gi.iter().rev().enumerate() {
            rows[n + i][i + j] = c.clone();
        }
    }
    let det = bareiss_det(rows);
    // res(cf·f, cg·g) = cf^n · cg^m · res(f, g)
    let denom = cf.pow(n as u32) * cg.pow(m as u32);
    Ok(Scalar::from_bigint(det) / denom)
}

/// Fraction-free Gaussian elimination determinant over ℤ.
pub(crate) fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! poly_owned_ops {
    ($tr:ident, $method:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
    };
}
poly_owned_ops!(Add, add);
poly_owned_ops!(Sub, sub);
poly_owned_ops!(Mul, mul);

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", c.abs()) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}*x")?,
                _ => write!(f, "{mag}*x^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_has_negative_infinite_degree() {
        assert_eq!(Poly::zero().degree(), Degree::NegInfinity);
        assert!(Degree::NegInfinity < Degree::Finite(0));
        assert_eq!(Poly::from_ints(&[1, 2, 0, 0]).degree(), Degree::Finite(1));
    }

    #[test]
    fn resultant_examples() {
        let xm1 = Poly::from_ints(&[-1, 1]);
        assert_eq!(poly_resultant(&xm1, &xm1).unwrap(), Scalar::zero());
        // Sylvester determinant of x^2 and x - 3 by hand: 9.
        let x2 = Poly::from_ints(&[0, 0, 1]);
        let xm3 = Poly::from_ints(&[-3, 1]);
        assert_eq!(poly_resultant(&x2, &xm3).unwrap(), Scalar::from_int(9));
        // b^3 - 4b has the root b = 2.
        let cubic = Poly::from_ints(&[0, -4, 0, 1]);
        let bm2 = Poly::from_ints(&[-2, 1]);
        assert_eq!(poly_resultant(&cubic, &bm2).unwrap(), Scalar::zero());
        assert!(poly_resultant(&Poly::zero(), &Poly::zero()).is_err());
    }

    #[test]
    fn resultant_with_rational_coefficients() {
        // res(x - 1/2, x^2 - 1) = (1/2)^2 - 1 = -3/4 (value of g at the root of f).
        let f = Poly::new(vec![Scalar::new(-1, 2), Scalar::one()]);
        let g = Poly::from_ints(&[-1, 0, 1]);
        assert_eq!(poly_resultant(&f, &g).unwrap(), Scalar::new(-3, 4));
        // res(2x - 1, x^2 - 1) = 2^2 * (-3/4) = -3
        let f2 = Poly::from_ints(&[-1, 2]);
        assert_eq!(poly_resultant(&f2, &g).unwrap(), Scalar::from_int(-3));
    }

    #[test]
    fn division_and_gcd() {
        let a = &Poly::from_ints(&[-1, 1]) * &Poly::from_ints(&[2, 0, 1]);
        let b = &Poly::from_ints(&[-1, 1]) * &Poly::from_ints(&[5, 1]);
        assert_eq!(a.gcd(&b), Poly::from_ints(&[-1, 1]));
        let (q, r) = a.div_rem(&Poly::from_ints(&[2, 0, 1])).unwrap();
        assert_eq!(q, Poly::from_ints(&[-1, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn sparse_text() {
        let p = Poly::new(vec![Scalar::new(-1, 4), Scalar::zero(), Scalar::one()]);
        assert_eq!(p.to_string(), "1*x^2 - 1/4");
    }
}
