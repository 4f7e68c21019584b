//! Exact projective geometry of P³: points, planes, lines and quadrics.
//!
//! Everything is generic over an exact [`Field`]; ℚ is the default and ℚ(i)
//! is used for lines recovered from numeric constructions.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::exact::{Field, Matrix, Scalar};

mod quadric;

pub use quadric::{quadric_singular_locus, QuadricForm, SingularLocus};

fn canonical<F: Field>(mut v: [F; 4]) -> Option<[F; 4]> {
    let lead = v.iter().find(|c| !c.is_zero())?.clone();
    for c in v.iter_mut() {
        *c = c.clone() / lead.clone();
    }
    Some(v)
}

fn dot<F: Field>(a: &[F; 4], b: &[F; 4]) -> F {
    a.iter()
        .zip(b)
        .fold(F::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

fn to_array<F: Field>(v: Vec<F>) -> [F; 4] {
    v.try_into().expect("four homogeneous coordinates")
}

/// Point of P³, stored with its first nonzero coordinate equal to 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjPoint<F = Scalar> {
    coords: [F; 4],
}

impl<F: Field> ProjPoint<F> {
    pub fn new(coords: [F; 4]) -> Result<Self, Error> {
        canonical(coords)
            .map(|coords| ProjPoint { coords })
            .ok_or_else(|| Error::InvalidInput("all homogeneous coordinates are zero".into()))
    }

    pub fn coords(&self) -> &[F; 4] {
        &self.coords
    }

    pub fn to_vec(&self) -> Vec<F> {
        self.coords.to_vec()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> ProjPoint<G> {
        ProjPoint::new([
            f(&self.coords[0]),
            f(&self.coords[1]),
            f(&self.coords[2]),
            f(&self.coords[3]),
        ])
        .expect("field embedding preserves nonzero coordinates")
    }

    /// Image under a 4×4 matrix acting on column vectors.
    pub fn transform(&self, m: &Matrix<F>) -> Result<Self, Error> {
        Self::new(to_array(m.apply(&self.coords)))
    }
}

impl ProjPoint<Scalar> {
    pub fn from_ints(c: [i64; 4]) -> Result<Self, Error> {
        Self::new(c.map(Scalar::from_int))
    }

    /// Coprime integer representative with first nonzero coordinate positive.
    pub fn integral(&self) -> [num_bigint::BigInt; 4] {
        integral_coords(&self.coords)
    }

    pub fn to_f64(&self) -> [f64; 4] {
        self.coords.clone().map(|c| c.to_f64())
    }
}

fn integral_coords(c: &[Scalar; 4]) -> [num_bigint::BigInt; 4] {
    use num_integer::Integer;
    let l = Scalar::from_bigint(Scalar::denominator_lcm(c.iter()));
    let ints = c.clone().map(|x| (x * &l).numer().clone());
    let g = ints
        .iter()
        .fold(num_bigint::BigInt::from(0), |acc, x| acc.gcd(x));
    if g == num_bigint::BigInt::from(0) {
        return ints;
    }
    ints.map(|x| x / &g)
}

impl<F: Field + fmt::Display> fmt::Display for ProjPoint<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.coords;
        write!(f, "({}:{}:{}:{})", c[0], c[1], c[2], c[3])
    }
}

impl<F: fmt::Debug> fmt::Debug for ProjPoint<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProjPoint{:?}", self.coords)
    }
}

impl<F: Serialize> Serialize for ProjPoint<F> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coords.serialize(serializer)
    }
}

/// Plane `aX + bY + cZ + dW = 0`, stored canonically like points.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjPlane<F = Scalar> {
    coeffs: [F; 4],
}

impl<F: Field> ProjPlane<F> {
    pub fn new(coeffs: [F; 4]) -> Result<Self, Error> {
        canonical(coeffs)
            .map(|coeffs| ProjPlane { coeffs })
            .ok_or_else(|| Error::InvalidInput("all plane coefficients are zero".into()))
    }

    pub fn coeffs(&self) -> &[F; 4] {
        &self.coeffs
    }

    /// The dual pairing with a point.
    pub fn eval(&self, p: &ProjPoint<F>) -> F {
        dot(&self.coeffs, &p.coords)
    }

    pub fn contains(&self, p: &ProjPoint<F>) -> bool {
        self.eval(p).is_zero()
    }

    /// Plane through three non-collinear points.
    pub fn through_points(a: &ProjPoint<F>, b: &ProjPoint<F>, c: &ProjPoint<F>) -> Result<Self, Error> {
        let m = Matrix::from_rows(vec![a.to_vec(), b.to_vec(), c.to_vec()]);
        let ker = m.nullspace();
        if ker.len() != 1 {
            return Err(Error::DegenerateSpan("three collinear points".into()));
        }
        Self::new(to_array(ker.into_iter().next().unwrap()))
    }
}

impl<F: Field + fmt::Display> fmt::Display for ProjPlane<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["X", "Y", "Z", "W"];
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .zip(names)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, n)| format!("({c}){n}"))
            .collect();
        write!(f, "{} = 0", terms.join(" + "))
    }
}

impl<F: fmt::Debug> fmt::Debug for ProjPlane<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProjPlane{:?}", self.coeffs)
    }
}

impl<F: Serialize> Serialize for ProjPlane<F> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}

/// Line of P³ carried both as a spanning point pair and as a cutting plane pair.
#[derive(Clone, Serialize)]
pub struct ProjLine<F = Scalar> {
    points: [ProjPoint<F>; 2],
    planes: [ProjPlane<F>; 2],
}

impl<F: Field> ProjLine<F> {
    pub fn points(&self) -> &[ProjPoint<F>; 2] {
        &self.points
    }

    pub fn planes(&self) -> &[ProjPlane<F>; 2] {
        &self.planes
    }

    /// Line cut out by two distinct planes.
    pub fn from_planes(h1: &ProjPlane<F>, h2: &ProjPlane<F>) -> Result<Self, Error> {
        let m = Matrix::from_rows(vec![h1.coeffs.to_vec(), h2.coeffs.to_vec()]);
        let ker = m.nullspace();
        if ker.len() != 2 {
            return Err(Error::DegenerateSpan("the two planes coincide".into()));
        }
        let mut it = ker.into_iter();
        let a = ProjPoint::new(to_array(it.next().unwrap()))?;
        let b = ProjPoint::new(to_array(it.next().unwrap()))?;
        Ok(ProjLine {
            points: [a, b],
            planes: [h1.clone(), h2.clone()],
        })
    }

    pub fn contains(&self, p: &ProjPoint<F>) -> bool {
        self.planes.iter().all(|h| h.contains(p))
    }

    /// Plücker coordinates `[p01, p02, p03, p12, p13, p23]` of the spanning pair.
    pub fn plucker(&self) -> [F; 6] {
        let (a, b) = (&self.points[0].coords, &self.points[1].coords);
        let p = |i: usize, j: usize| a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone();
        [p(0, 1), p(0, 2), p(0, 3), p(1, 2), p(1, 3), p(2, 3)]
    }

    /// `p01·p23 − p02·p13 + p03·p12`, zero for every genuine line.
    pub fn plucker_relation(&self) -> F {
        let p = self.plucker();
        p[0].clone() * p[5].clone() - p[1].clone() * p[4].clone() + p[2].clone() * p[3].clone()
    }

    pub fn same_line(&self, other: &Self) -> bool {
        other.points.iter().all(|p| self.contains(p))
    }

    /// Apply a matrix to the line: images of the points, planes pulled back
    /// through the inverse.
    pub fn transform(&self, m: &Matrix<F>) -> Result<Self, Error> {
        let a = self.points[0].transform(m)?;
        let b = self.points[1].transform(m)?;
        span_line(&a, &b)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G + Copy) -> ProjLine<G> {
        ProjLine {
            points: [self.points[0].map(f), self.points[1].map(f)],
            planes: [
                ProjPlane::new(self.planes[0].coeffs.clone().map(|c| f(&c))).unwrap(),
                ProjPlane::new(self.planes[1].coeffs.clone().map(|c| f(&c))).unwrap(),
            ],
        }
    }
}

impl<F: Field> PartialEq for ProjLine<F> {
    fn eq(&self, other: &Self) -> bool {
        self.same_line(other)
    }
}

impl<F: Field + fmt::Display> fmt::Display for ProjLine<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.planes[0], self.planes[1])
    }
}

impl<F: fmt::Debug> fmt::Debug for ProjLine<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProjLine")
            .field("points", &self.points)
            .field("planes", &self.planes)
            .finish()
    }
}

/// The unique line through two distinct points.
pub fn span_line<F: Field>(p: &ProjPoint<F>, q: &ProjPoint<F>) -> Result<ProjLine<F>, Error> {
    if p == q {
        return Err(Error::DegenerateSpan("the two points coincide".into()));
    }
    let m = Matrix::from_rows(vec![p.to_vec(), q.to_vec()]);
    let ker = m.nullspace();
    debug_assert_eq!(ker.len(), 2);
    let mut it = ker.into_iter();
    let h1 = ProjPlane::new(to_array(it.next().unwrap()))?;
    let h2 = ProjPlane::new(to_array(it.next().unwrap()))?;
    Ok(ProjLine {
        points: [p.clone(), q.clone()],
        planes: [h1, h2],
    })
}

/// How two lines of P³ meet.
#[derive(Clone, Debug, PartialEq)]
pub enum Incidence<F = Scalar> {
    Disjoint,
    Point(ProjPoint<F>),
    Equal,
}

impl<F: Field> Incidence<F> {
    pub fn point(&self) -> Option<&ProjPoint<F>> {
        match self {
            Incidence::Point(p) => Some(p),
            _ => None,
        }
    }
}

pub fn meet_lines<F: Field>(l1: &ProjLine<F>, l2: &ProjLine<F>) -> Incidence<F> {
    let rows = l1
        .planes
        .iter()
        .chain(&l2.planes)
        .map(|h| h.coeffs.to_vec())
        .collect();
    let ker = Matrix::from_rows(rows).nullspace();
    match ker.len() {
        0 => Incidence::Disjoint,
        1 => Incidence::Point(ProjPoint::new(to_array(ker.into_iter().next().unwrap())).unwrap()),
        _ => Incidence::Equal,
    }
}

/// The plane spanned by a line and a point off it.
pub fn plane_through<F: Field>(l: &ProjLine<F>, p: &ProjPoint<F>) -> Result<ProjPlane<F>, Error> {
    if l.contains(p) {
        return Err(Error::DegenerateSpan("the point lies on the line".into()));
    }
    ProjPlane::through_points(&l.points[0], &l.points[1], p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(c: [i64; 4]) -> ProjPoint {
        ProjPoint::from_ints(c).unwrap()
    }

    fn plane(c: [i64; 4]) -> ProjPlane {
        ProjPlane::new(c.map(Scalar::from_int)).unwrap()
    }

    #[test]
    fn canonical_point_equality() {
        assert_eq!(pt([4, -1, 2, 0]), pt([-8, 2, -4, 0]));
        assert_eq!(pt([4, -1, 2, 0]).integral().map(|x| x.to_string()), ["4", "-1", "2", "0"]);
        assert!(ProjPoint::from_ints([0, 0, 0, 0]).is_err());
    }

    #[test]
    fn span_coordinate_axis() {
        let l = span_line(&pt([1, 0, 0, 0]), &pt([0, 1, 0, 0])).unwrap();
        let expected = ProjLine::from_planes(&plane([0, 0, 1, 0]), &plane([0, 0, 0, 1])).unwrap();
        assert_eq!(l, expected);
        assert!(l.planes().contains(&plane([0, 0, 1, 0])));
        assert!(l.planes().contains(&plane([0, 0, 0, 1])));
    }

    #[test]
    fn span_tetrahedron_edge_q0_q3() {
        let l = span_line(&pt([0, 0, 0, 1]), &pt([4, 1, 0, 0])).unwrap();
        // Y - X/4 = 0 and Z = 0
        let y_minus_quarter_x =
            ProjPlane::new([Scalar::new(-1, 4), Scalar::one(), Scalar::zero(), Scalar::zero()]).unwrap();
        assert!(l.planes().contains(&y_minus_quarter_x));
        assert!(l.planes().contains(&plane([0, 0, 1, 0])));
    }

    #[test]
    fn span_same_point_is_error() {
        assert!(matches!(
            span_line(&pt([1, 2, 3, 4]), &pt([2, 4, 6, 8])),
            Err(Error::DegenerateSpan(_))
        ));
    }

    #[test]
    fn meet_examples() {
        let zw = ProjLine::from_planes(&plane([0, 0, 1, 0]), &plane([0, 0, 0, 1])).unwrap();
        let yw = ProjLine::from_planes(&plane([0, 1, 0, 0]), &plane([0, 0, 0, 1])).unwrap();
        let xy = ProjLine::from_planes(&plane([1, 0, 0, 0]), &plane([0, 1, 0, 0])).unwrap();
        assert_eq!(meet_lines(&zw, &yw), Incidence::Point(pt([1, 0, 0, 0])));
        assert_eq!(meet_lines(&zw, &xy), Incidence::Disjoint);
        assert_eq!(meet_lines(&zw, &zw), Incidence::Equal);
    }

    #[test]
    fn plane_through_examples() {
        let zw = ProjLine::from_planes(&plane([0, 0, 1, 0]), &plane([0, 0, 0, 1])).unwrap();
        assert_eq!(plane_through(&zw, &pt([0, 0, 1, 0])).unwrap(), plane([0, 0, 0, 1]));
        assert_eq!(plane_through(&zw, &pt([0, 0, 0, 1])).unwrap(), plane([0, 0, 1, 0]));
        assert!(plane_through(&zw, &pt([1, 1, 0, 0])).is_err());

        let edge = span_line(&pt([0, 0, 0, 1]), &pt([4, 1, 0, 0])).unwrap();
        let p = pt([1, 1, 1, 1]);
        let h = plane_through(&edge, &p).unwrap();
        for q in edge.points().iter().chain([&p]) {
            assert!(h.contains(q));
        }
    }

    fn small_point() -> impl Strategy<Value = [i64; 4]> {
        prop::array::uniform4(-6i64..=6).prop_filter("nonzero", |c| c.iter().any(|&x| x != 0))
    }

    proptest! {
        #[test]
        fn spanned_lines_are_consistent(a in small_point(), b in small_point()) {
            let (p, q) = (pt(a), pt(b));
            prop_assume!(p != q);
            let l = span_line(&p, &q).unwrap();
            for h in l.planes() {
                prop_assert!(h.contains(&p) && h.contains(&q));
            }
            prop_assert!(l.plucker_relation().is_zero());
        }

        #[test]
        fn meet_is_symmetric(a in small_point(), b in small_point(), c in small_point(), d in small_point()) {
            let (p, q, r, s) = (pt(a), pt(b), pt(c), pt(d));
            prop_assume!(p != q && r != s);
            let l1 = span_line(&p, &q).unwrap();
            let l2 = span_line(&r, &s).unwrap();
            prop_assert_eq!(meet_lines(&l1, &l2), meet_lines(&l2, &l1));
        }
    }
}
