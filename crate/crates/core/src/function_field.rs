//! The function field `ℚ(x)[y]/(y² − 4x³ − px − q)` of the curve, the
//! pullbacks of the four involutions `σ₀..σ₃`, and the fixed fields of the
//! six Klein subgroups they generate.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::curve::EllipticCurveModel;
use crate::error::Error;
use crate::exact::{ratfunc_equals, Poly, RatFunc, Scalar};
use crate::projective::QuadricForm;

/// `a(x) + b(x)·y`, reduced so that `y` appears at most linearly.
#[derive(Clone, PartialEq, Eq)]
pub struct CurveFunction {
    a: RatFunc,
    b: RatFunc,
    cubic: Poly,
}

impl CurveFunction {
    pub fn new(curve: &EllipticCurveModel, a: RatFunc, b: RatFunc) -> Self {
        CurveFunction {
            a,
            b,
            cubic: curve.cubic(),
        }
    }

    fn with(&self, a: RatFunc, b: RatFunc) -> Self {
        CurveFunction {
            a,
            b,
            cubic: self.cubic.clone(),
        }
    }

    pub fn constant(curve: &EllipticCurveModel, c: Scalar) -> Self {
        Self::new(curve, RatFunc::constant(c), RatFunc::zero())
    }

    pub fn x(curve: &EllipticCurveModel) -> Self {
        Self::new(curve, RatFunc::x(), RatFunc::zero())
    }

    pub fn y(curve: &EllipticCurveModel) -> Self {
        Self::new(curve, RatFunc::zero(), RatFunc::one())
    }

    pub fn from_ratfunc(curve: &EllipticCurveModel, a: RatFunc) -> Self {
        Self::new(curve, a, RatFunc::zero())
    }

    pub fn a(&self) -> &RatFunc {
        &self.a
    }

    pub fn b(&self) -> &RatFunc {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.b.is_zero() && self.a.is_constant()
    }

    pub fn same_curve(&self, other: &Self) -> bool {
        self.cubic == other.cubic
    }

    /// `a² − b²·(4x³ + px + q)`, the norm down to `ℚ(x)`.
    pub fn norm(&self) -> RatFunc {
        let f = RatFunc::from_poly(self.cubic.clone());
        &(&self.a * &self.a) - &(&(&self.b * &self.b) * &f)
    }

    pub fn conjugate(&self) -> Self {
        self.with(self.a.clone(), -&self.b)
    }

    pub fn inv(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DegenerateFunction("inverse of zero".into()));
        }
        let n = self.norm().inv()?;
        Ok(self.with(&self.a * &n, &(-&self.b) * &n))
    }

    pub fn div(&self, other: &Self) -> Result<Self, Error> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(self.with(RatFunc::one(), RatFunc::zero()), |acc, _| &acc * self)
    }

    /// Evaluate a rational function of `x` at this function.
    pub fn substitute_into(&self, r: &RatFunc) -> Result<Self, Error> {
        let num = self.horner(r.num());
        let den = self.horner(r.den());
        if den.is_zero() {
            return Err(Error::DegenerateFunction(format!(
                "substituting {self} into {r} annihilates the denominator"
            )));
        }
        num.div(&den)
    }

    fn horner(&self, p: &Poly) -> Self {
        p.coeffs().iter().rev().fold(self.with(RatFunc::zero(), RatFunc::zero()), |acc, c| {
            &(&acc * self) + &self.with(RatFunc::constant(c.clone()), RatFunc::zero())
        })
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.a.eval_f64(x) + self.b.eval_f64(x) * y
    }

    pub fn eval_complex(&self, x: num_complex::Complex64, y: num_complex::Complex64) -> num_complex::Complex64 {
        eval_ratfunc_complex(&self.a, x) + eval_ratfunc_complex(&self.b, x) * y
    }
}

pub(crate) fn eval_poly_complex(p: &Poly, x: num_complex::Complex64) -> num_complex::Complex64 {
    p.coeffs()
        .iter()
        .rev()
        .fold(num_complex::Complex64::new(0.0, 0.0), |acc, c| acc * x + c.to_f64())
}

pub(crate) fn eval_ratfunc_complex(r: &RatFunc, x: num_complex::Complex64) -> num_complex::Complex64 {
    eval_poly_complex(r.num(), x) / eval_poly_complex(r.den(), x)
}

impl Add for &CurveFunction {
    type Output = CurveFunction;
    fn add(self, rhs: &CurveFunction) -> CurveFunction {
        self.with(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl Sub for &CurveFunction {
    type Output = CurveFunction;
    fn sub(self, rhs: &CurveFunction) -> CurveFunction {
        self.with(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl Mul for &CurveFunction {
    type Output = CurveFunction;
    fn mul(self, rhs: &CurveFunction) -> CurveFunction {
        let f = RatFunc::from_poly(self.cubic.clone());
        let a = &(&self.a * &rhs.a) + &(&(&self.b * &rhs.b) * &f);
        let b = &(&self.a * &rhs.b) + &(&self.b * &rhs.a);
        self.with(a, b)
    }
}

impl Neg for &CurveFunction {
    type Output = CurveFunction;
    fn neg(self) -> CurveFunction {
        self.with(-&self.a, -&self.b)
    }
}

impl fmt::Display for CurveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "({})*y", self.b),
            (false, false) => write!(f, "{} + ({})*y", self.a, self.b),
        }
    }
}

impl fmt::Debug for CurveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for CurveFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("CurveFunction", 2)?;
        st.serialize_field("a", &self.a.to_string())?;
        st.serialize_field("b", &self.b.to_string())?;
        st.end()
    }
}

/// A field endomorphism of `k(C)` given by the images of `x` and `y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CurveMap {
    pub x_image: CurveFunction,
    pub y_image: CurveFunction,
}

impl CurveMap {
    pub fn identity(curve: &EllipticCurveModel) -> Self {
        CurveMap {
            x_image: CurveFunction::x(curve),
            y_image: CurveFunction::y(curve),
        }
    }

    /// `f(x, y) ↦ f(x_image, y_image)`.
    pub fn apply(&self, f: &CurveFunction) -> Result<CurveFunction, Error> {
        let a = self.x_image.substitute_into(&f.a)?;
        let b = self.x_image.substitute_into(&f.b)?;
        Ok(&a + &(&b * &self.y_image))
    }

    /// The map that applies `self` first and then `next`, i.e. `next ∘ self`
    /// on functions.
    pub fn then(&self, next: &CurveMap) -> Result<CurveMap, Error> {
        Ok(CurveMap {
            x_image: next.apply(&self.x_image)?,
            y_image: next.apply(&self.y_image)?,
        })
    }

    /// `y_image² − 4∏(x_image − eₖ)`, zero iff the map respects the curve.
    pub fn relation_defect(&self, curve: &EllipticCurveModel) -> Result<CurveFunction, Error> {
        let lhs = self.y_image.pow(2);
        let rhs = self.x_image.substitute_into(&RatFunc::from_poly(curve.cubic()))?;
        Ok(&lhs - &rhs)
    }
}

/// Pullback by `σ₀(z) = −z` or by `σᵢ(z) = −z + ωᵢ`, the involution fixing
/// the 2-torsion point `(eᵢ, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvolutionPullback {
    pub index: usize,
    #[serde(flatten)]
    pub map: CurveMap,
}

pub fn involution(curve: &EllipticCurveModel, index: usize) -> Result<InvolutionPullback, Error> {
    let map = match index {
        0 => CurveMap {
            x_image: CurveFunction::x(curve),
            y_image: -&CurveFunction::y(curve),
        },
        1..=3 => {
            let k = index - 1;
            let (e, a) = (&curve.e()[k], &curve.a()[k]);
            let shifted = Poly::linear_root(e);
            let x_img = &RatFunc::new(Poly::constant(a.clone()), shifted.clone())?
                + &RatFunc::constant(e.clone());
            let y_coeff = RatFunc::new(Poly::constant(a.clone()), shifted.pow(2))?;
            CurveMap {
                x_image: CurveFunction::from_ratfunc(curve, x_img),
                y_image: CurveFunction::new(curve, RatFunc::zero(), y_coeff),
            }
        }
        _ => {
            return Err(Error::InvalidInput(format!(
                "involution index {index} is not in 0..=3"
            )))
        }
    };
    Ok(InvolutionPullback { index, map })
}

pub fn involutions(curve: &EllipticCurveModel) -> [InvolutionPullback; 4] {
    [0, 1, 2, 3].map(|i| involution(curve, i).expect("index in range"))
}

pub fn pullback(sigma: &InvolutionPullback, f: &CurveFunction) -> Result<CurveFunction, Error> {
    if !sigma.map.x_image.same_curve(f) {
        return Err(Error::InvalidInput("function and involution live on different curves".into()));
    }
    sigma.map.apply(f)
}

/// Linear form `c₀X + c₁Y + c₂Z + c₃W` restricted to `(1 : x² : x : y)`.
pub fn linear_form_on_curve(curve: &EllipticCurveModel, c: &[Scalar; 4]) -> CurveFunction {
    let a = Poly::new(vec![c[0].clone(), c[2].clone(), c[1].clone()]);
    CurveFunction::new(curve, RatFunc::from_poly(a), RatFunc::constant(c[3].clone()))
}

/// Quadric restricted to `(1 : x² : x : y)`; zero iff the quadric contains the curve.
pub fn quadric_on_curve(curve: &EllipticCurveModel, q: &QuadricForm) -> CurveFunction {
    let coords = [
        CurveFunction::constant(curve, Scalar::one()),
        CurveFunction::from_ratfunc(curve, RatFunc::from_poly(Poly::monomial(Scalar::one(), 2))),
        CurveFunction::x(curve),
        CurveFunction::y(curve),
    ];
    let mut acc = CurveFunction::constant(curve, Scalar::zero());
    for i in 0..4 {
        for j in 0..4 {
            let c = &q.sym()[(i, j)];
            if !c.is_zero() {
                let term = &coords[i] * &coords[j];
                acc = &acc + &(&CurveFunction::constant(curve, c.clone()) * &term);
            }
        }
    }
    acc
}

/// The two planes cutting the Galois line of `⟨σᵢ, σⱼ⟩` (`i < j`):
/// `Y + cX = 0, Z − eX = 0` when `i = 0`, and `c_kX − Y + 2e_kZ = 0, W = 0`
/// otherwise, with `(c, e)` taken at the root left over by the pair.
pub fn line_plane_equations(curve: &EllipticCurveModel, i: usize, j: usize) -> Result<[[Scalar; 4]; 2], Error> {
    let z = Scalar::zero;
    let one = Scalar::one;
    match (i, j) {
        (0, 1..=3) => {
            let k = j - 1;
            Ok([
                [curve.c()[k].clone(), one(), z(), z()],
                [-&curve.e()[k], z(), one(), z()],
            ])
        }
        (1..=3, 2..=3) if i < j => {
            let k = 6 - i - j - 1;
            Ok([
                [curve.c()[k].clone(), -one(), Scalar::from_int(2) * &curve.e()[k], z()],
                [z(), z(), z(), one()],
            ])
        }
        _ => Err(Error::UnsupportedGroup(format!("G{i}{j} is not one of the six Klein subgroups"))),
    }
}

/// Certified generator of the fixed field of `G_ij = ⟨σᵢ, σⱼ⟩`.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FixedGenerator {
    pub group: (usize, usize),
    pub generator: CurveFunction,
    pub invariant: bool,
    pub matches_plane_ratio: bool,
    pub covering_degree: usize,
}

/// `(x² + cᵢ)/(x − eᵢ)` for `G₀ᵢ`, `y/(c_k + 2e_kx − x²)` for `G_ij`.
pub fn fixed_generator(curve: &EllipticCurveModel, i: usize, j: usize) -> Result<FixedGenerator, Error> {
    let planes = line_plane_equations(curve, i, j)?;
    let generator = if i == 0 {
        let k = j - 1;
        let num = Poly::new(vec![curve.c()[k].clone(), Scalar::zero(), Scalar::one()]);
        CurveFunction::from_ratfunc(curve, RatFunc::new(num, Poly::linear_root(&curve.e()[k]))?)
    } else {
        let k = 6 - i - j - 1;
        let den = Poly::new(vec![
            curve.c()[k].clone(),
            Scalar::from_int(2) * &curve.e()[k],
            -Scalar::one(),
        ]);
        CurveFunction::new(curve, RatFunc::zero(), RatFunc::new(Poly::one(), den)?)
    };
    let invariant = is_invariant(curve, &generator, &[i, j])?;
    // the ratio of the two cutting planes, numerator chosen to match the generator
    let ratio = if i == 0 {
        linear_form_on_curve(curve, &planes[0]).div(&linear_form_on_curve(curve, &planes[1]))?
    } else {
        linear_form_on_curve(curve, &planes[1]).div(&linear_form_on_curve(curve, &planes[0]))?
    };
    let matches_plane_ratio = curve_functions_equal(&ratio, &generator);
    let covering_degree = covering_degree(&generator)?;
    Ok(FixedGenerator {
        group: (i, j),
        generator,
        invariant,
        matches_plane_ratio,
        covering_degree,
    })
}

/// The printed variant `(x² + cᵢ)/(x − cᵢ)` of the `G₀ᵢ` generator.
pub fn printed_k0_variant(curve: &EllipticCurveModel, i: usize) -> Result<CurveFunction, Error> {
    if !(1..=3).contains(&i) {
        return Err(Error::UnsupportedGroup(format!("G0{i}")));
    }
    let k = i - 1;
    let num = Poly::new(vec![curve.c()[k].clone(), Scalar::zero(), Scalar::one()]);
    Ok(CurveFunction::from_ratfunc(
        curve,
        RatFunc::new(num, Poly::linear_root(&curve.c()[k]))?,
    ))
}

pub fn is_invariant(curve: &EllipticCurveModel, f: &CurveFunction, sigmas: &[usize]) -> Result<bool, Error> {
    for &s in sigmas {
        let img = pullback(&involution(curve, s)?, f)?;
        if !curve_functions_equal(&img, f) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn curve_functions_equal(f: &CurveFunction, g: &CurveFunction) -> bool {
    f.same_curve(g) && ratfunc_equals(&f.a, &g.a) && ratfunc_equals(&f.b, &g.b)
}

/// `[k(C) : k(f)]`.
///
/// For `f ∈ ℚ(x)` this is twice the degree of `f` as a map `P¹ → P¹`.
/// Otherwise `k(x, f) = k(C)` and the degree is the `x`-degree of the
/// primitive relation `D²T² − 2ADT + (A² − B²·(4x³+px+q))` between `x` and
/// `T = f`, where `f = (A + By)/D`.
pub fn covering_degree(f: &CurveFunction) -> Result<usize, Error> {
    if f.is_constant() {
        return Err(Error::InvalidInput(format!("{f} is constant")));
    }
    if f.b.is_zero() {
        let d = f.a.num().degree_or_zero().max(f.a.den().degree_or_zero());
        return Ok(2 * d);
    }
    let d = &f.a.den().monic() * &f.b.den().monic();
    let d = d.div_exact(&f.a.den().gcd(f.b.den()))?;
    let a = f.a.num() * &d.div_exact(f.a.den())?;
    let b = f.b.num() * &d.div_exact(f.b.den())?;
    let c2 = &d * &d;
    let c1 = (&a * &d).scale(&Scalar::from_int(-2));
    let c0 = &(&a * &a) - &(&(&b * &b) * &f.cubic);
    let g = c2.gcd(&c1).gcd(&c0);
    let deg = [c2, c1, c0]
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| c.div_exact(&g).map(|q| q.degree_or_zero()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(deg.into_iter().max().unwrap_or(0))
}

/// The separation matrix: entry `[s][g]` says whether `σ_s` fixes the
/// generator of the `g`-th group in `(0,1), (0,2), (0,3), (1,2), (1,3), (2,3)`.
pub fn separation_table(curve: &EllipticCurveModel) -> Result<[[bool; 6]; 4], Error> {
    let mut out = [[false; 6]; 4];
    for (g, &(i, j)) in crate::curve::EDGE_PAIRS.iter().enumerate() {
        let gen = fixed_generator(curve, i, j)?.generator;
        for (s, row) in out.iter_mut().enumerate() {
            row[g] = is_invariant(curve, &gen, &[s])?;
        }
    }
    Ok(out)
}
