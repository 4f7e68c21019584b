//! Projections of the space quartic from a point: exact implicit equation
//! of the image, conic detection at cone vertices, and classification of
//! centers against the Galois-line catalog.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::curve::EllipticCurveModel;
use crate::error::Error;
use crate::exact::Scalar;
use crate::galois::{GaloisCatalog, LineLabel};
use crate::projective::ProjPoint;

const VAR_NAMES: [&str; 4] = ["X", "Y", "Z", "W"];

/// A homogeneous polynomial in three variables over ℚ.
#[derive(Clone, PartialEq, Eq)]
pub struct PlaneForm {
    vars: [&'static str; 3],
    terms: BTreeMap<[u32; 3], Scalar>,
}

impl PlaneForm {
    pub fn zero(vars: [&'static str; 3]) -> Self {
        PlaneForm {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(vars: [&'static str; 3], terms: impl IntoIterator<Item = ([u32; 3], Scalar)>) -> Self {
        let mut f = Self::zero(vars);
        for (m, c) in terms {
            f.add_term(m, c);
        }
        f
    }

    pub fn constant(vars: [&'static str; 3], c: Scalar) -> Self {
        Self::from_terms(vars, [([0, 0, 0], c)])
    }

    pub fn linear(vars: [&'static str; 3], c: &[Scalar; 3]) -> Self {
        Self::from_terms(vars, (0..3).map(|i| (unit(i), c[i].clone())))
    }

    fn add_term(&mut self, m: [u32; 3], c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Scalar::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn vars(&self) -> [&'static str; 3] {
        self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 3], &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: [u32; 3]) -> Scalar {
        self.terms.get(&m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.iter().sum::<u32>());
        match degs.next() {
            Some(d) => degs.all(|e| e == d),
            None => true,
        }
    }

    /// The term with the lexicographically largest exponent vector.
    pub fn leading(&self) -> Option<([u32; 3], &Scalar)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::from_terms(self.vars, self.terms.iter().map(|(m, v)| (*m, v * c)))
    }

    /// Rescaled so the leading coefficient is `1`.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, c)) => self.scale(&c.inv()),
            None => self.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.vars);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term([a[0] + b[0], a[1] + b[1], a[2] + b[2]], ca * cb);
            }
        }
        out
    }

    pub fn eval(&self, p: &[Scalar; 3]) -> Scalar {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for k in 0..3 {
                t = t * p[k].pow(m[k]);
            }
            acc += &t;
        }
        acc
    }

    pub fn eval_complex(&self, p: &[Complex64; 3]) -> Complex64 {
        self.terms
            .iter()
            .map(|(m, c)| (0..3).fold(Complex64::new(c.to_f64(), 0.0), |acc, k| acc * p[k].powu(m[k])))
            .sum()
    }

    /// Sum of absolute coefficient values, for relative residuals.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).sum()
    }

    /// `S` with `self = c·S²` for a rational constant `c`, if one exists.
    ///
    /// Works on the monic form: the leading term of a square is the square of
    /// the leading term, and each remainder term fixes one new term of `S`.
    pub fn square_root(&self) -> Option<PlaneForm> {
        let g = self.monic();
        let (lead, _) = g.leading()?;
        if lead.iter().any(|e| e % 2 == 1) {
            return None;
        }
        let m0 = lead.map(|e| e / 2);
        let mut s = PlaneForm::from_terms(self.vars, [(m0, Scalar::one())]);
        let two = Scalar::from_int(2);
        let max_terms = {
            let d = m0.iter().sum::<u32>() as usize;
            (d + 1) * (d + 2) / 2
        };
        for _ in 0..=max_terms {
            let r = g.sub(&s.mul(&s));
            let Some((lr, c)) = r.leading() else { return Some(s) };
            if (0..3).any(|k| lr[k] < m0[k]) {
                return None;
            }
            let t = [lr[0] - m0[0], lr[1] - m0[1], lr[2] - m0[2]];
            if t >= m0 {
                return None;
            }
            s.add_term(t, c / &two);
        }
        None
    }
}

fn unit(i: usize) -> [u32; 3] {
    let mut m = [0; 3];
    m[i] = 1;
    m
}

fn monomial_string(vars: &[&str; 3], m: &[u32; 3]) -> String {
    let parts: Vec<String> = (0..3)
        .filter(|&k| m[k] > 0)
        .map(|k| if m[k] == 1 { vars[k].to_string() } else { format!("{}^{}", vars[k], m[k]) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for PlaneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let mono = monomial_string(&self.vars, m);
            let (neg, abs) = (c.is_negative(), c.abs());
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if mono == "1" {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PlaneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlaneForm({self})")
    }
}

/// Serialized as a map from monomial to coefficient, leading term first.
impl Serialize for PlaneForm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.terms.len()))?;
        for (m, c) in self.terms.iter().rev() {
            map.serialize_entry(&monomial_string(&self.vars, m), &c.to_string())?;
        }
        map.end()
    }
}

/// The image `π_P(C) ⊂ P²` of a projection.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PlaneCurveRecord {
    /// Monic quartic vanishing on the image.
    pub form: PlaneForm,
    pub degree: u32,
    pub center: ProjPoint,
    /// The coordinate dropped by the projection (the last one with `Pₖ ≠ 0`).
    pub eliminated: usize,
    /// Rows of the projection `uᵢ = xᵢ − (Pᵢ/Pₖ)·xₖ`.
    pub projection: [[Scalar; 4]; 3],
    /// `Some(S)` when the quartic is `S²` up to a constant: the projection is
    /// then 2:1 onto the conic `S = 0`.
    pub conic: Option<PlaneForm>,
}

impl PlaneCurveRecord {
    pub fn is_double_cover(&self) -> bool {
        self.conic.is_some()
    }

    pub fn project(&self, x: &[Scalar; 4]) -> [Scalar; 3] {
        std::array::from_fn(|i| (0..4).fold(Scalar::zero(), |acc, j| acc + &self.projection[i][j] * &x[j]))
    }

    pub fn project_complex(&self, x: &[Complex64; 4]) -> [Complex64; 3] {
        std::array::from_fn(|i| (0..4).map(|j| self.projection[i][j].to_f64() * x[j]).sum())
    }

    /// `|Γ(π(x))| / (‖Γ‖₁·‖π(x)‖⁴)`, zero for points of the image.
    pub fn residual(&self, x: &[Complex64; 4]) -> f64 {
        let u = self.project_complex(x);
        let n = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        self.form.eval_complex(&u).norm() / (self.form.coefficient_norm() * n.powi(4))
    }
}

/// Project the curve from `center` and return the implicit equation of the
/// image, found as the resultant of the two pencil quadrics along the lines
/// through the center.
pub fn project_curve(curve: &EllipticCurveModel, center: &ProjPoint) -> Result<PlaneCurveRecord, Error> {
    if curve.contains(center) {
        return Err(Error::InvalidCenter(format!("{center} lies on the curve")));
    }
    let p = center.coords();
    let k = (0..4).rev().find(|&i| !p[i].is_zero()).expect("nonzero point");
    let kept: Vec<usize> = (0..4).filter(|&i| i != k).collect();
    let vars: [&'static str; 3] = [VAR_NAMES[kept[0]], VAR_NAMES[kept[1]], VAR_NAMES[kept[2]]];

    // x = u + t·P with uₖ = 0, so F(x) = C(u) + t·B(u) + t²·A
    let parts = |q: &crate::projective::QuadricForm| {
        let s = q.sym();
        let a = PlaneForm::constant(vars, q.eval(center));
        let sp: Vec<Scalar> = s.apply(p);
        let b = PlaneForm::linear(vars, &std::array::from_fn(|i| Scalar::from_int(2) * &sp[kept[i]]));
        let mut c = PlaneForm::zero(vars);
        for (ii, &i) in kept.iter().enumerate() {
            for (jj, &j) in kept.iter().enumerate() {
                let mut m = unit(ii);
                m[jj] += 1;
                c.add_term(m, s[(i, j)].clone());
            }
        }
        (a, b, c)
    };
    let (a1, b1, c1) = parts(curve.f1());
    let (a2, b2, c2) = parts(curve.f2());
    let ac = a1.mul(&c2).sub(&a2.mul(&c1));
    let ab = a1.mul(&b2).sub(&a2.mul(&b1));
    let bc = b1.mul(&c2).sub(&b2.mul(&c1));
    let res = ac.mul(&ac).sub(&ab.mul(&bc));
    if res.is_zero() {
        return Err(Error::DegeneratePencil(format!("resultant vanishes identically for center {center}")));
    }
    let form = res.monic();
    let conic = form.square_root();
    let projection = std::array::from_fn(|r| {
        let i = kept[r];
        let mut row: [Scalar; 4] = std::array::from_fn(|_| Scalar::zero());
        row[i] = Scalar::one();
        row[k] = -(&p[i] / &p[k]);
        row
    });
    Ok(PlaneCurveRecord {
        degree: form.degree().unwrap_or(0),
        form,
        center: center.clone(),
        eliminated: k,
        projection,
        conic,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CenterClass {
    Vertex { vertex: usize },
    OnGaloisLine { lines: Vec<LineLabel> },
    Generic,
}

/// Where a center sits relative to the arrangement: exact tests for lines
/// over ℚ and ℚ(i), tolerance tests for the rest.
pub fn classify_center(catalog: &GaloisCatalog, p: &ProjPoint) -> Result<CenterClass, Error> {
    if catalog.curve.contains(p) {
        return Err(Error::InvalidCenter(format!("{p} lies on the curve")));
    }
    if let Some(v) = catalog.tetrahedron.vertices.iter().position(|q| q == p) {
        return Ok(CenterClass::Vertex { vertex: v });
    }
    let lines = catalog.lines_through(p);
    Ok(if lines.is_empty() {
        CenterClass::Generic
    } else {
        CenterClass::OnGaloisLine { lines }
    })
}
