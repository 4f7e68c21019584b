//! The quartic model of an elliptic curve in P³.
//!
//! For roots `e₁ + e₂ + e₃ = 0` the curve `y² = 4(x−e₁)(x−e₂)(x−e₃)` is
//! embedded as `(1 : x² : x : y)`. Its ideal is generated by
//! `F₁ = XY − Z²` and `F₂ = 4YZ + pXZ + qX² − W²`; the pencil `bF₁ + F₂`
//! degenerates to a cone exactly at `b = ∞` and at the three roots `b = −4eᵢ`
//! of `b³ + 4pb − 16q`.

use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::exact::{Field, Matrix, Poly, Scalar};
use crate::projective::{
    quadric_singular_locus, span_line, ProjLine, ProjPoint, QuadricForm,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EllipticCurveModel {
    e: [Scalar; 3],
    p: Scalar,
    q: Scalar,
    c: [Scalar; 3],
    a: [Scalar; 3],
    b: [Scalar; 3],
    j_classical: Scalar,
    is_lemniscatic: bool,
    #[serde(rename = "F1")]
    f1: QuadricForm,
    #[serde(rename = "F2")]
    f2: QuadricForm,
}

/// Indices `(j, k)` complementary to `i` in `{0, 1, 2}`.
pub(crate) fn others(i: usize) -> (usize, usize) {
    match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

pub fn curve_from_roots(e1: Scalar, e2: Scalar, e3: Scalar) -> Result<EllipticCurveModel, Error> {
    let e = [e1, e2, e3];
    for i in 0..3 {
        for j in i + 1..3 {
            if e[i] == e[j] {
                return Err(Error::SingularCurve(format!("repeated root {}", e[i])));
            }
        }
    }
    let sum = &e[0] + &e[1] + &e[2];
    if !sum.is_zero() {
        return Err(Error::NotWeierstrassNormal(sum.to_string()));
    }
    let p = Scalar::from_int(4) * (&e[0] * &e[1] + &e[0] * &e[2] + &e[1] * &e[2]);
    let q = Scalar::from_int(-4) * &e[0] * &e[1] * &e[2];
    let c = [0, 1, 2].map(|i| {
        let (j, k) = others(i);
        &e[i] * &e[i] + &e[j] * &e[k]
    });
    let a = [0, 1, 2].map(|i| {
        let (j, k) = others(i);
        (&e[i] - &e[j]) * (&e[i] - &e[k])
    });
    let b = [0, 1, 2].map(|i| Scalar::from_int(-4) * &e[i]);

    let g2 = -&p;
    let g3 = -&q;
    let g2_cubed = g2.pow(3);
    let j_classical =
        Scalar::from_int(1728) * &g2_cubed / (&g2_cubed - Scalar::from_int(27) * g3.pow(2));
    let is_lemniscatic = j_classical == Scalar::from_int(1728);

    let one = Scalar::one();
    let f1 = QuadricForm::from_monomials(&[((0, 1), one.clone()), ((2, 2), -&one)]);
    let f2 = QuadricForm::from_monomials(&[
        ((1, 2), Scalar::from_int(4)),
        ((0, 2), p.clone()),
        ((0, 0), q.clone()),
        ((3, 3), -&one),
    ]);
    Ok(EllipticCurveModel {
        e,
        p,
        q,
        c,
        a,
        b,
        j_classical,
        is_lemniscatic,
        f1,
        f2,
    })
}

/// Curve from `y² = 4x³ + px + q`, which must split over ℚ. Roots are
/// taken in decreasing order.
pub fn curve_from_pq(p: Scalar, q: Scalar) -> Result<EllipticCurveModel, Error> {
    let cubic = Poly::new(vec![q.clone(), p.clone(), Scalar::zero(), Scalar::from_int(4)]);
    let disc = -(Scalar::from_int(16)) * (Scalar::from_int(4) * p.pow(3) + Scalar::from_int(27) * q.pow(2));
    if disc.is_zero() {
        return Err(Error::SingularCurve(format!("4x^3 + ({p})x + ({q}) has a repeated root")));
    }
    let mut roots = Vec::new();
    for z in cubic_roots_numeric(p.to_f64(), q.to_f64()) {
        if z.im.abs() > 1e-9 * (1.0 + z.re.abs()) {
            continue;
        }
        for max_den in [10u64, 1_000, 100_000, 10_000_000] {
            if let Some(r) = Scalar::approximate(z.re, max_den) {
                if cubic.eval(&r).is_zero() && !roots.contains(&r) {
                    roots.push(r);
                    break;
                }
            }
        }
    }
    if roots.len() != 3 {
        return Err(Error::InvalidInput(format!(
            "4x^3 + ({p})x + ({q}) does not split over the rationals; exact mode needs rational roots (pass --roots)"
        )));
    }
    roots.sort();
    roots.reverse();
    let [e1, e2, e3]: [Scalar; 3] = roots.try_into().expect("three roots");
    curve_from_roots(e1, e2, e3)
}

/// Roots of `4x³ + px + q` by Durand–Kerner.
fn cubic_roots_numeric(p: f64, q: f64) -> [Complex64; 3] {
    let coeffs = [q / 4.0, p / 4.0, 0.0];
    let f = |z: Complex64| z * z * z + coeffs[2] * z * z + coeffs[1] * z + coeffs[0];
    let scale = 1.0 + coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z = [seed * scale, seed.powu(2) * scale, seed.powu(3) * scale];
    for _ in 0..500 {
        let prev = z;
        for i in 0..3 {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            z[i] -= f(z[i]) / den;
        }
        if (0..3).all(|i| (z[i] - prev[i]).norm() < 1e-15 * scale) {
            break;
        }
    }
    z
}

impl EllipticCurveModel {
    pub fn e(&self) -> &[Scalar; 3] {
        &self.e
    }

    pub fn p(&self) -> &Scalar {
        &self.p
    }

    pub fn q(&self) -> &Scalar {
        &self.q
    }

    pub fn c(&self) -> &[Scalar; 3] {
        &self.c
    }

    pub fn a(&self) -> &[Scalar; 3] {
        &self.a
    }

    pub fn b(&self) -> &[Scalar; 3] {
        &self.b
    }

    pub fn j_classical(&self) -> &Scalar {
        &self.j_classical
    }

    /// `j = 1728`, written `j = 1` in the normalization that divides by 1728.
    pub fn is_lemniscatic(&self) -> bool {
        self.is_lemniscatic
    }

    pub fn f1(&self) -> &QuadricForm {
        &self.f1
    }

    pub fn f2(&self) -> &QuadricForm {
        &self.f2
    }

    /// `4x³ + px + q`.
    pub fn cubic(&self) -> Poly {
        Poly::new(vec![
            self.q.clone(),
            self.p.clone(),
            Scalar::zero(),
            Scalar::from_int(4),
        ])
    }

    /// `b³ + 4pb − 16q`, vanishing at the finite singular members of the pencil.
    pub fn pencil_cubic(&self) -> Poly {
        Poly::new(vec![
            Scalar::from_int(-16) * &self.q,
            Scalar::from_int(4) * &self.p,
            Scalar::zero(),
            Scalar::one(),
        ])
    }

    pub fn pencil_member(&self, b: &PencilParam) -> QuadricForm {
        match b {
            PencilParam::Infinity => self.f1.clone(),
            PencilParam::Finite(b) => self.f1.scale(b).add(&self.f2),
        }
    }

    pub fn on_curve(&self, x: &Scalar, y: &Scalar) -> bool {
        y * y == self.cubic().eval(x)
    }

    pub fn embed_point(&self, x: &Scalar, y: &Scalar) -> Result<ProjPoint, Error> {
        if !self.on_curve(x, y) {
            return Err(Error::NotOnCurve(format!("({x}, {y})")));
        }
        ProjPoint::new([Scalar::one(), x * x, x.clone(), y.clone()])
    }

    pub fn contains(&self, pt: &ProjPoint) -> bool {
        self.f1.vanishes_at(pt) && self.f2.vanishes_at(pt)
    }

    /// The four cone vertices `Q₀ = (0:0:0:1)`, `Qᵢ = (1:−cᵢ:eᵢ:0)`.
    pub fn vertex_formula(&self, i: usize) -> ProjPoint {
        if i == 0 {
            return ProjPoint::from_ints([0, 0, 0, 1]).expect("nonzero");
        }
        let k = i - 1;
        ProjPoint::new([Scalar::one(), -&self.c[k], self.e[k].clone(), Scalar::zero()])
            .expect("nonzero")
    }
}

/// Pencil coordinate `b` of `bF₁ + F₂`, with `∞` standing for `F₁` itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PencilParam {
    Infinity,
    Finite(Scalar),
}

impl fmt::Display for PencilParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PencilParam::Infinity => write!(f, "inf"),
            PencilParam::Finite(b) => write!(f, "{b}"),
        }
    }
}

impl Serialize for PencilParam {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConeRecord {
    pub b_value: PencilParam,
    pub quadric: QuadricForm,
    pub vertex: ProjPoint,
    pub index: usize,
}

/// The four rank-3 members of the pencil, with vertices read off the kernel.
pub fn singular_pencil_members(curve: &EllipticCurveModel) -> Vec<ConeRecord> {
    let params = std::iter::once(PencilParam::Infinity)
        .chain(curve.b.iter().cloned().map(PencilParam::Finite));
    params
        .enumerate()
        .map(|(index, b_value)| {
            let quadric = curve.pencil_member(&b_value);
            let locus = quadric_singular_locus(&quadric).expect("pencil members are nonzero");
            let vertex = locus
                .vertex()
                .expect("distinct roots give rank-3 cones")
                .clone();
            ConeRecord {
                b_value,
                quadric,
                vertex,
                index,
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Tetrahedron {
    pub vertices: [ProjPoint; 4],
    /// Edges in the order `(0,1), (0,2), (0,3), (1,2), (1,3), (2,3)`.
    pub edges: Vec<((usize, usize), ProjLine)>,
    /// Determinant of the vertex rows `(0,0,0,1)` and `(1, −cᵢ, eᵢ, 0)`.
    pub determinant: Scalar,
}

pub const EDGE_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub fn tetrahedron(curve: &EllipticCurveModel) -> Tetrahedron {
    let cones = singular_pencil_members(curve);
    let vertices: [ProjPoint; 4] = [0, 1, 2, 3].map(|i| cones[i].vertex.clone());
    let edges = EDGE_PAIRS
        .iter()
        .map(|&(i, j)| {
            let l = span_line(&vertices[i], &vertices[j]).expect("distinct vertices");
            ((i, j), l)
        })
        .collect();
    let rows: Vec<Vec<Scalar>> = (0..4).map(|i| curve.vertex_formula(i).to_vec()).collect();
    let determinant = Matrix::from_rows(rows).det();
    Tetrahedron {
        vertices,
        edges,
        determinant,
    }
}

/// `F(sA + tB)` as the binary quadratic `[F(A), 2B(A,B), F(B)]`.
fn restrict<F: Field>(q: &QuadricForm<F>, a: &[F], b: &[F]) -> [F; 3] {
    let sb = q.sym().apply(b);
    let ab = a
        .iter()
        .zip(&sb)
        .fold(F::zero(), |acc, (x, y)| acc + x.clone() * y.clone());
    [q.eval_vec(a), ab.clone() + ab, q.eval_vec(b)]
}

/// Resultant of two binary forms of formal degree 2.
pub(crate) fn binary_quadratic_resultant<F: Field>(f: &[F; 3], g: &[F; 3]) -> F {
    let z = F::zero;
    Matrix::from_rows(vec![
        vec![f[0].clone(), f[1].clone(), f[2].clone(), z()],
        vec![z(), f[0].clone(), f[1].clone(), f[2].clone()],
        vec![g[0].clone(), g[1].clone(), g[2].clone(), z()],
        vec![z(), g[0].clone(), g[1].clone(), g[2].clone()],
    ])
    .det()
}

/// Whether the line meets the curve, decided by a resultant of the
/// restrictions of `F₁` and `F₂` to the line.
pub fn line_meets_curve<F: Field + From<Scalar>>(curve: &EllipticCurveModel, l: &ProjLine<F>) -> bool {
    line_curve_resultant(curve, l).is_zero()
}

pub fn line_curve_resultant<F: Field + From<Scalar>>(curve: &EllipticCurveModel, l: &ProjLine<F>) -> F {
    let f1 = curve.f1.map(|c| F::from(c.clone()));
    let f2 = curve.f2.map(|c| F::from(c.clone()));
    let [a, b] = l.points();
    let r1 = restrict(&f1, a.coords(), b.coords());
    let r2 = restrict(&f2, a.coords(), b.coords());
    binary_quadratic_resultant(&r1, &r2)
}
