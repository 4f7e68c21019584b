//! The Galois-line catalog: the six Klein lines with exact certificates, the
//! eight cyclic lines of the lemniscatic curve built numerically, and the
//! incidence report comparing line geometry with group intersections.

use std::fmt;

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::curve::{line_curve_resultant, line_meets_curve, tetrahedron, EllipticCurveModel, Tetrahedron, EDGE_PAIRS};
use crate::error::Error;
use crate::exact::{Field, GaussRat, Matrix, Scalar};
use crate::function_field::{curve_functions_equal, involution, line_plane_equations, linear_form_on_curve};
use crate::numeric::{
    apply4, apply4_left, c64, matrix_entries, normalize, normalize_matrix, projective_distance,
    proportional, scalar_defect, smallest_singular, svd_sorted, CVec4,
};
use crate::projective::{meet_lines, span_line, Incidence, ProjLine, ProjPlane, ProjPoint, QuadricForm};
use crate::torus::{
    enumerate_galois_groups, group_intersection, AutomorphismGroup, GroupKind, GroupLabel, TorusAutomorphism,
    Uniformization,
};

pub const DEFAULT_TOL: f64 = 1e-8;

/// A projective transformation, exact over ℚ, exact over ℚ(i), or numeric.
#[derive(Clone, Debug, PartialEq)]
pub enum ProjTransform {
    Exact(Matrix<Scalar>),
    Gaussian(Matrix<GaussRat>),
    Numeric(Matrix4<Complex64>),
}

impl ProjTransform {
    pub fn identity() -> Self {
        ProjTransform::Exact(Matrix::identity(4))
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, ProjTransform::Numeric(_))
    }

    pub fn to_numeric(&self) -> Matrix4<Complex64> {
        match self {
            ProjTransform::Exact(m) => Matrix4::from_fn(|i, j| c64(m[(i, j)].to_f64(), 0.0)),
            ProjTransform::Gaussian(m) => Matrix4::from_fn(|i, j| m[(i, j)].to_complex()),
            ProjTransform::Numeric(m) => *m,
        }
    }

    fn to_gaussian(&self) -> Option<Matrix<GaussRat>> {
        match self {
            ProjTransform::Exact(m) => Some(m.map(|c| GaussRat::real(c.clone()))),
            ProjTransform::Gaussian(m) => Some(m.clone()),
            ProjTransform::Numeric(_) => None,
        }
    }

    /// `self ∘ other`, staying exact when both factors are.
    pub fn compose(&self, other: &Self) -> Self {
        match (self, other) {
            (ProjTransform::Exact(a), ProjTransform::Exact(b)) => ProjTransform::Exact(a * b),
            (ProjTransform::Numeric(_), _) | (_, ProjTransform::Numeric(_)) => {
                ProjTransform::Numeric(self.to_numeric() * other.to_numeric())
            }
            _ => {
                let (a, b) = (self.to_gaussian().unwrap(), other.to_gaussian().unwrap());
                ProjTransform::Gaussian(&a * &b)
            }
        }
    }

    /// Whether the transformation is the identity of P³, with a residual
    /// for numeric matrices.
    pub fn is_scalar(&self, tol: f64) -> (bool, f64) {
        match self {
            ProjTransform::Exact(m) => (m.is_scalar(), 0.0),
            ProjTransform::Gaussian(m) => (m.is_scalar(), 0.0),
            ProjTransform::Numeric(m) => {
                let d = scalar_defect(m);
                (d < tol, d)
            }
        }
    }

    /// Equality up to a nonzero scalar, with a residual for numeric matrices.
    pub fn same_as(&self, other: &Self, tol: f64) -> (bool, f64) {
        match (self.to_gaussian(), other.to_gaussian()) {
            (Some(a), Some(b)) => (a.proportionality(&b).is_some(), 0.0),
            _ => {
                let d = projective_distance(&self.to_numeric(), &other.to_numeric());
                (d < tol, d)
            }
        }
    }
}

impl Serialize for ProjTransform {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("ProjTransform", 2)?;
        match self {
            ProjTransform::Exact(m) => {
                st.serialize_field("mode", "exact")?;
                let rows: Vec<Vec<String>> = m.rows().iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect();
                st.serialize_field("rows", &rows)?;
            }
            ProjTransform::Gaussian(m) => {
                st.serialize_field("mode", "exact-gaussian")?;
                let rows: Vec<Vec<String>> = m.rows().iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect();
                st.serialize_field("rows", &rows)?;
            }
            ProjTransform::Numeric(m) => {
                st.serialize_field("mode", "numeric")?;
                let rows: Vec<Vec<[f64; 2]>> =
                    (0..4).map(|i| (0..4).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
                st.serialize_field("rows", &rows)?;
            }
        }
        st.end()
    }
}

pub(crate) fn cvec_json(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

/// The matrix of `σᵢ` on `(1 : x² : x : y)` with denominators cleared.
///
/// `σ₀` is `diag(1, 1, 1, −1)`. For `i ≥ 1` write `u = eᵢx + aᵢ − eᵢ²`; the
/// rows express `(x−eᵢ)²`, `u²`, `u(x−eᵢ)` and `aᵢy` in `1, x², x, y`.
pub fn automorphism_matrix(curve: &EllipticCurveModel, i: usize) -> Result<ProjTransform, Error> {
    let s = Scalar::from_int;
    let z = Scalar::zero;
    match i {
        0 => Ok(ProjTransform::Exact(Matrix::diagonal(vec![s(1), s(1), s(1), s(-1)]))),
        1..=3 => {
            let (e, a) = (&curve.e()[i - 1], &curve.a()[i - 1]);
            let u0 = a - &(e * e);
            Ok(ProjTransform::Exact(Matrix::from_rows(vec![
                vec![e * e, s(1), s(-2) * e, z()],
                vec![&u0 * &u0, e * e, s(2) * e * &u0, z()],
                vec![-(e * &u0), e.clone(), &u0 - &(e * e), z()],
                vec![z(), z(), z(), a.clone()],
            ])))
        }
        _ => Err(Error::InvalidInput(format!("involution index {i} is not in 0..=3"))),
    }
}

/// Whether the matrix rows, divided by the first, reproduce the pulled back
/// coordinates `(σ*x², σ*x, σ*y)` in the function field.
pub fn matrix_realizes_involution(curve: &EllipticCurveModel, i: usize) -> Result<bool, Error> {
    let ProjTransform::Exact(m) = automorphism_matrix(curve, i)? else {
        unreachable!("involution matrices are rational")
    };
    let sigma = involution(curve, i)?;
    let row = |k: usize| -> [Scalar; 4] { std::array::from_fn(|j| m[(k, j)].clone()) };
    let base = linear_form_on_curve(curve, &row(0));
    let x_img = &sigma.map.x_image;
    let targets = [x_img * x_img, x_img.clone(), sigma.map.y_image.clone()];
    for (k, target) in targets.iter().enumerate() {
        let ratio = linear_form_on_curve(curve, &row(k + 1)).div(&base)?;
        if !curve_functions_equal(&ratio, target) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LineLabel {
    Edge(usize, usize),
    Z4(i64, i64),
}

impl fmt::Display for LineLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LineLabel::Edge(i, j) => write!(f, "Q{i}Q{j}"),
            LineLabel::Z4(m, n) => write!(f, "l({m},{n})"),
        }
    }
}

impl Serialize for LineLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A line kept numerically (orthonormal point and plane pairs) and, when
/// available, exactly over ℚ or ℚ(i).
#[derive(Clone, Debug)]
pub struct CatalogLine {
    pub exact: Option<ProjLine<Scalar>>,
    pub gaussian: Option<ProjLine<GaussRat>>,
    pub points: [CVec4; 2],
    pub planes: [CVec4; 2],
}

fn to4(v: &[Complex64]) -> CVec4 {
    [v[0], v[1], v[2], v[3]]
}

impl CatalogLine {
    pub fn from_exact(line: ProjLine<Scalar>) -> Self {
        let planes: Vec<Vec<Complex64>> = line
            .planes()
            .iter()
            .map(|h| h.coeffs().iter().map(|c| c64(c.to_f64(), 0.0)).collect())
            .collect();
        let mut out = Self::from_numeric_planes(&planes).expect("exact planes are independent");
        out.exact = Some(line);
        out
    }

    /// The line cut out by two (numerically independent) planes.
    pub fn from_numeric_planes(planes: &[Vec<Complex64>]) -> Result<Self, Error> {
        let (sv, vecs) = svd_sorted(planes, 4);
        if sv[1] < 1e-6 * sv[0] {
            return Err(Error::DegenerateSpan("the two planes coincide numerically".into()));
        }
        // row space of the planes = first two right singular vectors
        let hs = [to4(&vecs[0]).map(|c| c.conj()), to4(&vecs[1]).map(|c| c.conj())];
        let pts = [to4(&vecs[2]), to4(&vecs[3])];
        Ok(CatalogLine {
            exact: None,
            gaussian: None,
            points: pts,
            planes: hs,
        })
    }

    /// Largest `|h·p|` over the two unit planes, for a unit-normalized `p`.
    pub fn distance(&self, p: &[Complex64]) -> f64 {
        let p = normalize(p);
        self.planes.iter().map(|h| crate::numeric::dot(h, &p).norm()).fold(0.0, f64::max)
    }

    /// The exact line over ℚ(i), if the line is known exactly at all.
    pub fn as_gaussian(&self) -> Option<ProjLine<GaussRat>> {
        match (&self.exact, &self.gaussian) {
            (Some(l), _) => Some(l.map(|c| GaussRat::real(c.clone()))),
            (None, Some(l)) => Some(l.clone()),
            _ => None,
        }
    }

    /// The line over ℚ, when it is defined there. A line known over ℚ(i) is
    /// rational iff the real and imaginary parts of its planes cut it out.
    pub fn rational(&self) -> Option<ProjLine<Scalar>> {
        if let Some(l) = &self.exact {
            return Some(l.clone());
        }
        let g = self.gaussian.as_ref()?;
        let parts: Vec<ProjPlane> = g
            .planes()
            .iter()
            .flat_map(|h| [h.coeffs().clone().map(|c| c.re), h.coeffs().clone().map(|c| c.im)])
            .filter_map(|c| ProjPlane::new(c).ok())
            .collect();
        for (k, a) in parts.iter().enumerate() {
            for b in &parts[k + 1..] {
                if let Ok(l) = ProjLine::from_planes(a, b) {
                    let lifted = l.map(|c| GaussRat::real(c.clone()));
                    return lifted.same_line(g).then_some(l);
                }
            }
        }
        None
    }

    pub fn contains_exact(&self, p: &ProjPoint) -> Option<bool> {
        self.as_gaussian().map(|l| l.contains(&p.map(|c| GaussRat::real(c.clone()))))
    }
}

impl Serialize for CatalogLine {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("CatalogLine", 3)?;
        if let Some(l) = &self.exact {
            st.serialize_field("mode", "exact")?;
            st.serialize_field("planes", &l.planes())?;
            st.serialize_field("points", &l.points())?;
        } else if let Some(l) = &self.gaussian {
            st.serialize_field("mode", "exact-gaussian")?;
            st.serialize_field("planes", &l.planes())?;
            st.serialize_field("points", &l.points())?;
        } else {
            st.serialize_field("mode", "numeric")?;
            st.serialize_field("planes", &self.planes.iter().map(|h| cvec_json(h)).collect::<Vec<_>>())?;
            st.serialize_field("points", &self.points.iter().map(|p| cvec_json(p)).collect::<Vec<_>>())?;
        }
        st.end()
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CertificateReport {
    /// `exact`, `exact-gaussian` or `numeric`.
    pub mode: &'static str,
    pub tolerance: Option<f64>,
    pub checks: Vec<CheckOutcome>,
    /// Whether every group element fixes the line pointwise. Not part of
    /// the certificate: reflections in the group fix only two points.
    pub fixes_line_pointwise: bool,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn into_result(self) -> Result<Self, Error> {
        match self.first_failure() {
            Some(c) => Err(Error::CertificateFailure {
                check: c.name.to_string(),
                detail: c.detail.clone(),
            }),
            None => Ok(self),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RealizedElement {
    pub element: String,
    #[serde(skip)]
    pub automorphism: TorusAutomorphism,
    pub matrix: ProjTransform,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GaloisLineRecord {
    pub label: LineLabel,
    pub kind: GroupKind,
    pub group: AutomorphismGroup,
    pub line: CatalogLine,
    pub realization: Vec<RealizedElement>,
    pub certificate: CertificateReport,
    pub incident_vertices: Vec<usize>,
    /// Outcome of rounding the numeric data to ℚ(i) (cyclic lines only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gaussian_recovery: Option<String>,
}

impl GaloisLineRecord {
    pub fn matrix_of(&self, g: &TorusAutomorphism) -> Option<&ProjTransform> {
        self.realization.iter().find(|r| &r.automorphism == g).map(|r| &r.matrix)
    }
}

/// Matrices for every group element, from matrices of generators.
fn realize(
    uni: &Uniformization,
    group: &AutomorphismGroup,
    gens: &[(TorusAutomorphism, ProjTransform)],
) -> Vec<RealizedElement> {
    let lat = uni.lattice();
    let mut found: Vec<(TorusAutomorphism, ProjTransform)> = vec![(TorusAutomorphism::identity(), ProjTransform::identity())];
    let mut frontier = 0;
    while frontier < found.len() {
        let (h, mh) = found[frontier].clone();
        for (g, mg) in gens {
            let gh = g.compose(lat, &h);
            if !found.iter().any(|(k, _)| k == &gh) {
                found.push((gh, mg.compose(&mh)));
            }
        }
        frontier += 1;
    }
    group
        .elements
        .iter()
        .map(|g| {
            let (_, m) = found.iter().find(|(k, _)| k == g).expect("generators span the group");
            RealizedElement {
                element: g.describe(lat),
                automorphism: g.clone(),
                matrix: m.clone(),
            }
        })
        .collect()
}

fn numeric_quadric(q: &QuadricForm) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| c64(q.sym()[(i, j)].to_f64(), 0.0))
}

fn sym_monomials(s: &Matrix4<Complex64>) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(10);
    for i in 0..4 {
        for j in i..4 {
            out.push(if i == j { s[(i, i)] } else { s[(i, j)] + s[(j, i)] });
        }
    }
    out
}

/// `F(sA + tB)` as `[F(A), 2B(A,B), F(B)]` with complex data.
fn restrict_numeric(s: &Matrix4<Complex64>, a: &CVec4, b: &CVec4) -> [Complex64; 3] {
    let q = |u: &CVec4, v: &CVec4| -> Complex64 { (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| u[i] * s[(i, j)] * v[j]).sum() };
    [q(a, a), q(a, b) * 2.0, q(b, b)]
}

/// Resultant of the restrictions of `F₁, F₂` to a line given by unit points.
pub fn numeric_line_resultant(curve: &EllipticCurveModel, points: &[CVec4; 2]) -> Complex64 {
    let f = restrict_numeric(&numeric_quadric(curve.f1()), &points[0], &points[1]);
    let g = restrict_numeric(&numeric_quadric(curve.f2()), &points[0], &points[1]);
    let z = c64(0.0, 0.0);
    Matrix4::new(
        f[0], f[1], f[2], z, //
        z, f[0], f[1], f[2], //
        g[0], g[1], g[2], z, //
        z, g[0], g[1], g[2],
    )
    .determinant()
}

/// Random torus arguments away from the 2-torsion, in lattice coordinates.
fn sample_arguments(rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (r, s): (f64, f64) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let near_half = |x: f64| ((2.0 * x) - (2.0 * x).round()).abs() < 0.05;
        if !(near_half(r) && near_half(s)) {
            out.push((r, s));
        }
    }
    out
}

/// Everything a certificate needs besides the record.
pub struct CertificateContext<'a> {
    pub curve: &'a EllipticCurveModel,
    pub uni: &'a Uniformization,
    pub tol: f64,
    pub seed: u64,
}

/// Run the checks (a)–(f) on a record.
///
/// (a) the line misses the curve; (b) every matrix fixes every plane through
/// the line, i.e. acts by one common scalar on the two cutting planes;
/// (c) the pencil `span{F₁, F₂}` is preserved; (d) the multiplication table
/// matches the torus group; (e) group orbits of curve points are coplanar
/// with the line; (f) each matrix moves torus points as its torus element.
pub fn certificate_report(ctx: &CertificateContext<'_>, record: &GaloisLineRecord) -> CertificateReport {
    let exact = record.line.exact.is_some() && record.realization.iter().all(|r| !r.matrix.is_numeric());
    let gaussian = !exact && record.line.gaussian.is_some() && record.realization.iter().all(|r| !r.matrix.is_numeric());
    let mut checks = Vec::new();
    let mut pointwise = true;

    // (a)
    if let Some(l) = &record.line.exact {
        let r = line_curve_resultant(ctx.curve, l);
        checks.push(CheckOutcome {
            name: "a-disjoint-from-curve",
            passed: !r.is_zero(),
            residual: None,
            detail: format!("resultant {r}"),
        });
    } else if let Some(l) = record.line.gaussian.as_ref().filter(|_| gaussian) {
        let meets = line_meets_curve(ctx.curve, l);
        checks.push(CheckOutcome {
            name: "a-disjoint-from-curve",
            passed: !meets,
            residual: None,
            detail: format!("resultant {}", line_curve_resultant(ctx.curve, l)),
        });
    } else {
        let r = numeric_line_resultant(ctx.curve, &record.line.points).norm();
        checks.push(CheckOutcome {
            name: "a-disjoint-from-curve",
            passed: r > ctx.tol.sqrt(),
            residual: Some(r),
            detail: format!("|resultant| = {r:.3e}"),
        });
    }

    // (b) and (c)
    let mut worst_b: f64 = 0.0;
    let mut worst_c: f64 = 0.0;
    let mut ok_b = true;
    let mut ok_c = true;
    for r in &record.realization {
        match (&r.matrix, &record.line.exact) {
            (ProjTransform::Exact(m), Some(l)) if exact => {
                let (b, pw) = exact_plane_check(m, l);
                ok_b &= b;
                pointwise &= pw;
                let span = [ctx.curve.f1().clone(), ctx.curve.f2().clone()];
                ok_c &= span.iter().all(|f| f.pullback(m).in_span(&span));
            }
            _ if gaussian => {
                let m = r.matrix.to_gaussian().unwrap();
                let l = record.line.gaussian.as_ref().unwrap();
                let (b, pw) = exact_plane_check(&m, l);
                ok_b &= b;
                pointwise &= pw;
                let span = [ctx.curve.f1().map(|c| GaussRat::real(c.clone())), ctx.curve.f2().map(|c| GaussRat::real(c.clone()))];
                ok_c &= span.iter().all(|f| f.pullback(&m).in_span(&span));
            }
            _ => {
                let m = normalize_matrix(&r.matrix.to_numeric());
                let (b, pw) = numeric_plane_check(&m, &record.line);
                worst_b = worst_b.max(b);
                pointwise &= pw < ctx.tol;
                worst_c = worst_c.max(numeric_pencil_defect(ctx.curve, &m));
            }
        }
    }
    if exact || gaussian {
        checks.push(CheckOutcome {
            name: "b-planes-through-line-fixed",
            passed: ok_b,
            residual: None,
            detail: "each matrix acts on both cutting planes by one scalar".into(),
        });
        checks.push(CheckOutcome {
            name: "c-pencil-preserved",
            passed: ok_c,
            residual: None,
            detail: "F1∘M and F2∘M lie in span{F1, F2}".into(),
        });
    } else {
        checks.push(CheckOutcome {
            name: "b-planes-through-line-fixed",
            passed: worst_b < ctx.tol,
            residual: Some(worst_b),
            detail: format!("max plane residual {worst_b:.3e}"),
        });
        checks.push(CheckOutcome {
            name: "c-pencil-preserved",
            passed: worst_c < ctx.tol,
            residual: Some(worst_c),
            detail: format!("max span defect {worst_c:.3e}"),
        });
    }

    // (d)
    checks.push(table_check(ctx, record));

    // (e)
    checks.push(orbit_check(ctx, record, exact));

    // (f)
    checks.push(realization_check(ctx, record));

    CertificateReport {
        mode: if exact {
            "exact"
        } else if gaussian {
            "exact-gaussian"
        } else {
            "numeric"
        },
        tolerance: (!exact && !gaussian).then_some(ctx.tol),
        checks,
        fixes_line_pointwise: pointwise,
    }
}

/// Certificate as a result: `Err(CertificateFailure)` names the first failed check.
pub fn verify_galois_certificate(ctx: &CertificateContext<'_>, record: &GaloisLineRecord) -> Result<CertificateReport, Error> {
    certificate_report(ctx, record).into_result()
}

/// (planes through the line fixed, line fixed pointwise)
fn exact_plane_check<F: Field>(m: &Matrix<F>, l: &ProjLine<F>) -> (bool, bool) {
    let mut mus = Vec::new();
    for h in l.planes() {
        let img = m.apply_left(h.coeffs());
        match crate::exact::matrix::proportionality(img.iter(), h.coeffs().iter()) {
            Some(mu) => mus.push(mu),
            None => return (false, false),
        }
    }
    let planes_ok = mus[0] == mus[1];
    let mut lambdas = Vec::new();
    for p in l.points() {
        let img = m.apply(p.coords());
        match crate::exact::matrix::proportionality(img.iter(), p.coords().iter()) {
            Some(l) => lambdas.push(l),
            None => return (planes_ok, false),
        }
    }
    (planes_ok, lambdas[0] == lambdas[1])
}

/// (plane residual, pointwise residual) for a normalized numeric matrix.
fn numeric_plane_check(m: &Matrix4<Complex64>, l: &CatalogLine) -> (f64, f64) {
    let (mu0, r0) = proportional(&apply4_left(m, &l.planes[0]), &l.planes[0]);
    let (mu1, r1) = proportional(&apply4_left(m, &l.planes[1]), &l.planes[1]);
    let plane = r0.max(r1).max((mu0 - mu1).norm() / mu0.norm().max(1e-300));
    let (la0, s0) = proportional(&apply4(m, &l.points[0]), &l.points[0]);
    let (la1, s1) = proportional(&apply4(m, &l.points[1]), &l.points[1]);
    let point = s0.max(s1).max((la0 - la1).norm() / la0.norm().max(1e-300));
    (plane, point)
}

fn numeric_pencil_defect(curve: &EllipticCurveModel, m: &Matrix4<Complex64>) -> f64 {
    let f1 = numeric_quadric(curve.f1());
    let f2 = numeric_quadric(curve.f2());
    let mut worst: f64 = 0.0;
    for f in [&f1, &f2] {
        let pulled = m.transpose() * f * m;
        let rows = vec![
            normalize(&sym_monomials(&f1)),
            normalize(&sym_monomials(&f2)),
            normalize(&sym_monomials(&pulled)),
        ];
        // three rows in ten columns: the third singular value is the defect
        let (sv, _) = svd_sorted(&rows, 10);
        worst = worst.max(sv[2] / sv[0]);
    }
    worst
}

fn table_check(ctx: &CertificateContext<'_>, record: &GaloisLineRecord) -> CheckOutcome {
    let lat = ctx.uni.lattice();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for a in &record.realization {
        let (scalar, _) = a.matrix.is_scalar(ctx.tol);
        if a.automorphism.is_identity() != scalar {
            ok = false;
        }
        for b in &record.realization {
            let gh = a.automorphism.compose(lat, &b.automorphism);
            let Some(target) = record.matrix_of(&gh) else {
                ok = false;
                continue;
            };
            let (same, d) = target.same_as(&a.matrix.compose(&b.matrix), ctx.tol);
            ok &= same;
            worst = worst.max(d);
        }
    }
    let numeric = record.realization.iter().any(|r| r.matrix.is_numeric());
    CheckOutcome {
        name: "d-group-table",
        passed: ok && record.realization.len() == 4,
        residual: numeric.then_some(worst),
        detail: format!("{} table matches the torus group", record.kind),
    }
}

fn orbit_check(ctx: &CertificateContext<'_>, record: &GaloisLineRecord, exact: bool) -> CheckOutcome {
    // numeric orbits of torus points, exact for every point when possible
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x0e0e);
    let lat = ctx.uni.lattice();
    let mut worst: f64 = 0.0;
    for (r, s) in sample_arguments(&mut rng, 10) {
        let z = lat.point(r, s);
        let mut rows: Vec<Vec<Complex64>> = record.line.points.iter().map(|p| p.to_vec()).collect();
        for g in &record.group.elements {
            rows.push(normalize(&crate::torus::torus_point_with(&ctx.uni.evaluator, g.apply(lat, z))));
        }
        let (sv, _) = svd_sorted(&rows, 4);
        worst = worst.max(sv[3] / sv[0]);
    }
    let generic = exact.then(|| exact_orbit_identity(ctx.curve, record));
    let passed = worst < ctx.tol && generic.unwrap_or(true);
    CheckOutcome {
        name: "e-orbits-coplanar-with-line",
        passed,
        residual: Some(worst),
        detail: match generic {
            Some(g) => format!("generic point identity {g}; 10 sampled orbits, max rank defect {worst:.3e}"),
            None => format!("10 sampled orbits, max rank defect {worst:.3e}"),
        },
    }
}

/// `L₁·(L₂∘M) − L₂·(L₁∘M) = 0` in `k(C)` for the cutting planes `L₁, L₂`:
/// the image of the generic point lies on the plane through it and the line.
fn exact_orbit_identity(curve: &EllipticCurveModel, record: &GaloisLineRecord) -> bool {
    let l = record.line.exact.as_ref().unwrap();
    let [h1, h2] = l.planes().clone().map(|h| h.coeffs().clone());
    let f1 = linear_form_on_curve(curve, &h1);
    let f2 = linear_form_on_curve(curve, &h2);
    record.realization.iter().all(|r| {
        let ProjTransform::Exact(m) = &r.matrix else { return false };
        let g1: [Scalar; 4] = m.apply_left(&h1).try_into().unwrap();
        let g2: [Scalar; 4] = m.apply_left(&h2).try_into().unwrap();
        let lhs = &f1 * &linear_form_on_curve(curve, &g2);
        let rhs = &f2 * &linear_form_on_curve(curve, &g1);
        (&lhs - &rhs).is_zero()
    })
}

fn realization_check(ctx: &CertificateContext<'_>, record: &GaloisLineRecord) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0xf00f);
    let lat = ctx.uni.lattice();
    let ev = &ctx.uni.evaluator;
    let mut worst: f64 = 0.0;
    for (r, s) in sample_arguments(&mut rng, 6) {
        let z = lat.point(r, s);
        let v = crate::torus::torus_point_with(ev, z);
        for e in &record.realization {
            let img = apply4(&e.matrix.to_numeric(), &v);
            let want = crate::torus::torus_point_with(ev, e.automorphism.apply(lat, z));
            worst = worst.max(proportional(&img, &want).1);
        }
    }
    CheckOutcome {
        name: "f-matrices-realize-torus-group",
        passed: worst < ctx.tol,
        residual: Some(worst),
        detail: format!("max residual {worst:.3e} on 6 torus points"),
    }
}

fn torus_index_of(uni: &Uniformization, curve_index: usize) -> usize {
    (0..4).find(|&t| uni.curve_involution(t) == curve_index).expect("bijection")
}

/// The six Klein lines: edge `QᵢQⱼ` with group `⟨σᵢ, σⱼ⟩`, cut out by
/// `Y + cᵢX = Z − eᵢX = 0` or `c_kX − Y + 2e_kZ = W = 0`.
pub fn build_v4_records(ctx: &CertificateContext<'_>, tet: &Tetrahedron) -> Result<Vec<GaloisLineRecord>, Error> {
    let lat = ctx.uni.lattice();
    let mut out = Vec::new();
    for &(i, j) in &EDGE_PAIRS {
        let [h1, h2] = line_plane_equations(ctx.curve, i, j)?;
        let line = ProjLine::from_planes(&ProjPlane::new(h1)?, &ProjPlane::new(h2)?)?;
        let edge = span_line(&tet.vertices[i], &tet.vertices[j])?;
        if !line.same_line(&edge) {
            return Err(Error::CertificateFailure {
                check: "edge-equations".into(),
                detail: format!("Q{i}Q{j} is not cut out by its plane equations"),
            });
        }
        let (ti, tj) = (torus_index_of(ctx.uni, i), torus_index_of(ctx.uni, j));
        let group = AutomorphismGroup::v4(lat, ti.min(tj), ti.max(tj));
        let gens = [
            (TorusAutomorphism::involution(lat, ti), automorphism_matrix(ctx.curve, i)?),
            (TorusAutomorphism::involution(lat, tj), automorphism_matrix(ctx.curve, j)?),
        ];
        let realization = realize(ctx.uni, &group, &gens);
        let mut record = GaloisLineRecord {
            label: LineLabel::Edge(i, j),
            kind: GroupKind::V4,
            group,
            line: CatalogLine::from_exact(line),
            realization,
            certificate: placeholder_certificate(),
            incident_vertices: vec![],
            gaussian_recovery: None,
        };
        record.incident_vertices = incident_vertices(&record.line, tet, ctx.tol);
        record.certificate = certificate_report(ctx, &record);
        out.push(record);
    }
    Ok(out)
}

fn placeholder_certificate() -> CertificateReport {
    CertificateReport {
        mode: "numeric",
        tolerance: None,
        checks: vec![],
        fixes_line_pointwise: false,
    }
}

fn incident_vertices(line: &CatalogLine, tet: &Tetrahedron, tol: f64) -> Vec<usize> {
    (0..4)
        .filter(|&k| match line.contains_exact(&tet.vertices[k]) {
            Some(b) => b,
            None => line.distance(&real_point(&tet.vertices[k])) < tol,
        })
        .collect()
}

fn real_point(p: &ProjPoint) -> CVec4 {
    p.to_f64().map(|x| c64(x, 0.0))
}

/// Matrix `M` with `M·v(z) ∝ v(g(z))` on sampled torus points, from the
/// null vector of the 2×2-minor equations.
fn recover_matrix(uni: &Uniformization, g: &TorusAutomorphism, rng: &mut ChaCha8Rng) -> Result<Matrix4<Complex64>, Error> {
    let lat = uni.lattice();
    let ev = &uni.evaluator;
    for _attempt in 0..5 {
        let mut rows: Vec<Vec<Complex64>> = Vec::new();
        for (r, s) in sample_arguments(rng, 12) {
            let z = lat.point(r, s);
            let v = crate::torus::torus_point_with(ev, z);
            let w = crate::torus::torus_point_with(ev, g.apply(lat, z));
            for a in 0..4 {
                for b in a + 1..4 {
                    let mut row = vec![c64(0.0, 0.0); 16];
                    for j in 0..4 {
                        row[4 * a + j] += v[j] * w[b];
                        row[4 * b + j] -= v[j] * w[a];
                    }
                    rows.push(row);
                }
            }
        }
        let (v, smallest, next) = smallest_singular(&rows, 16);
        if smallest < 1e-10 && next > 1e-6 {
            return Ok(normalize_matrix(&Matrix4::from_fn(|i, j| v[4 * i + j])));
        }
    }
    Err(Error::Construction(format!("no well-conditioned matrix for {}", g.describe(lat))))
}

/// The plane through the orbit of `z`, if the orbit spans exactly a plane.
fn orbit_plane(uni: &Uniformization, group: &AutomorphismGroup, z: Complex64) -> Option<Vec<Complex64>> {
    let lat = uni.lattice();
    let rows: Vec<Vec<Complex64>> = group
        .elements
        .iter()
        .map(|g| normalize(&crate::torus::torus_point_with(&uni.evaluator, g.apply(lat, z))))
        .collect();
    let (h, smallest, next) = smallest_singular(&rows, 4);
    (smallest < 1e-9 && next > 1e-6).then_some(h)
}

/// The Galois line of a group: two orbit planes cut it out; a third orbit
/// plane must contain it.
fn line_from_orbits(uni: &Uniformization, group: &AutomorphismGroup, rng: &mut ChaCha8Rng, tol: f64) -> Result<CatalogLine, Error> {
    let lat = uni.lattice();
    let mut planes: Vec<Vec<Complex64>> = Vec::new();
    let mut tries = 0;
    while planes.len() < 3 {
        tries += 1;
        if tries > 50 {
            return Err(Error::Construction(format!("orbit planes of {} stay degenerate", group.label)));
        }
        let (r, s) = sample_arguments(rng, 1)[0];
        let Some(h) = orbit_plane(uni, group, lat.point(r, s)) else { continue };
        if planes.len() == 1 {
            let (sv, _) = svd_sorted(&[planes[0].clone(), h.clone()], 4);
            if sv[1] < 1e-6 * sv[0] {
                continue;
            }
        }
        planes.push(h);
    }
    let line = CatalogLine::from_numeric_planes(&planes[..2])?;
    let third = normalize(&planes[2]);
    let off = line.points.iter().map(|p| crate::numeric::dot(&third, p).norm()).fold(0.0, f64::max);
    if off > tol {
        return Err(Error::Construction(format!("third orbit plane misses the line by {off:.3e}")));
    }
    Ok(line)
}

/// Complex row echelon form of the two planes, for rounding to ℚ(i).
fn echelon_planes(planes: &[CVec4; 2]) -> [CVec4; 2] {
    let mut m = *planes;
    let p0 = (0..4).max_by(|&a, &b| m[0][a].norm().partial_cmp(&m[0][b].norm()).unwrap()).unwrap();
    let piv = m[0][p0];
    m[0] = m[0].map(|c| c / piv);
    let f = m[1][p0];
    m[1] = std::array::from_fn(|j| m[1][j] - f * m[0][j]);
    let p1 = (0..4).max_by(|&a, &b| m[1][a].norm().partial_cmp(&m[1][b].norm()).unwrap()).unwrap();
    let piv = m[1][p1];
    m[1] = m[1].map(|c| c / piv);
    let f = m[0][p1];
    m[0] = std::array::from_fn(|j| m[0][j] - f * m[1][j]);
    m
}

fn round_gaussian(z: Complex64) -> Option<GaussRat> {
    let g = GaussRat::approximate(z, 4096)?;
    ((g.to_complex() - z).norm() < 1e-9).then_some(g)
}

/// Try to round the line and the generator to ℚ(i); keep the exact data
/// only if the rounded objects pass the exact checks.
fn gaussian_recovery(
    curve: &EllipticCurveModel,
    line: &CatalogLine,
    generator: &Matrix4<Complex64>,
) -> Result<(ProjLine<GaussRat>, Matrix<GaussRat>), String> {
    let ech = echelon_planes(&line.planes);
    let mut hs = Vec::new();
    for h in &ech {
        let coeffs: Option<Vec<GaussRat>> = h.iter().map(|&c| round_gaussian(c)).collect();
        let coeffs = coeffs.ok_or("plane coefficients are not Gaussian rationals of small height")?;
        hs.push(ProjPlane::new(coeffs.try_into().unwrap()).map_err(|e| e.to_string())?);
    }
    let l = ProjLine::from_planes(&hs[0], &hs[1]).map_err(|e| e.to_string())?;
    if line_meets_curve(curve, &l) {
        return Err("rounded line meets the curve".into());
    }
    let entries: Option<Vec<GaussRat>> = matrix_entries(generator).into_iter().map(round_gaussian).collect();
    let entries = entries.ok_or("generator entries are not Gaussian rationals of small height")?;
    let m = Matrix::from_rows(entries.chunks(4).map(|r| r.to_vec()).collect());
    let span = [curve.f1().map(|c| GaussRat::real(c.clone())), curve.f2().map(|c| GaussRat::real(c.clone()))];
    if !span.iter().all(|f| f.pullback(&m).in_span(&span)) {
        return Err("rounded generator does not preserve the pencil".into());
    }
    let m2 = &m * &m;
    if m2.is_scalar() || !(&m2 * &m2).is_scalar() {
        return Err("rounded generator does not have order 4".into());
    }
    Ok((l, m))
}

/// The eight cyclic lines of a curve with `j = 1728`.
pub fn build_z4_records(ctx: &CertificateContext<'_>, tet: &Tetrahedron) -> Result<Vec<GaloisLineRecord>, Error> {
    if !ctx.curve.is_lemniscatic() {
        return Err(Error::UnsupportedGroup("cyclic Galois lines need j = 1728".into()));
    }
    let lat = ctx.uni.lattice();
    if lat.symmetry_order() != 4 {
        return Err(Error::Construction("period lattice of a j = 1728 curve is not square".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut out = Vec::new();
    for group in enumerate_galois_groups(lat).into_iter().filter(|g| g.kind == GroupKind::Z4) {
        let GroupLabel::Z4(m, n) = group.label else { continue };
        let g = group.elements.iter().find(|g| g.eps_power == 1).expect("ε = i element").clone();
        let mat = recover_matrix(ctx.uni, &g, &mut rng)?;
        let line = line_from_orbits(ctx.uni, &group, &mut rng, ctx.tol)?;
        let numeric = |why: String| {
            let gens = [(g.clone(), ProjTransform::Numeric(mat))];
            z4_record(ctx, tet, &group, (m, n), line.clone(), &gens, format!("numeric only: {why}"))
        };
        let record = match gaussian_recovery(ctx.curve, &line, &mat) {
            Ok((gl, gm)) => {
                let mut exact_line = line.clone();
                exact_line.gaussian = Some(gl);
                let gens = [(g.clone(), ProjTransform::Gaussian(gm))];
                let rec = z4_record(ctx, tet, &group, (m, n), exact_line, &gens, "recovered over Q(i) and verified exactly".into());
                match rec.certificate.first_failure() {
                    None => rec,
                    Some(c) => numeric(format!("rounded data fails {}", c.name)),
                }
            }
            Err(why) => numeric(why),
        };
        out.push(record);
    }
    Ok(out)
}

fn z4_record(
    ctx: &CertificateContext<'_>,
    tet: &Tetrahedron,
    group: &AutomorphismGroup,
    (m, n): (i64, i64),
    line: CatalogLine,
    gens: &[(TorusAutomorphism, ProjTransform)],
    recovery: String,
) -> GaloisLineRecord {
    let mut record = GaloisLineRecord {
        label: LineLabel::Z4(m, n),
        kind: GroupKind::Z4,
        group: group.clone(),
        realization: realize(ctx.uni, group, gens),
        incident_vertices: incident_vertices(&line, tet, ctx.tol),
        line,
        certificate: placeholder_certificate(),
        gaussian_recovery: Some(recovery),
    };
    record.certificate = certificate_report(ctx, &record);
    record
}

/// All Galois lines of a curve with their certificates.
pub struct GaloisCatalog {
    pub curve: EllipticCurveModel,
    pub uniformization: Uniformization,
    pub tetrahedron: Tetrahedron,
    pub records: Vec<GaloisLineRecord>,
    pub tol: f64,
    pub seed: u64,
}

impl GaloisCatalog {
    pub fn build(curve: &EllipticCurveModel, tol: f64, seed: u64) -> Result<Self, Error> {
        let uni = Uniformization::from_curve(curve)?;
        let tet = tetrahedron(curve);
        let ctx = CertificateContext {
            curve,
            uni: &uni,
            tol,
            seed,
        };
        let mut records = build_v4_records(&ctx, &tet)?;
        if curve.is_lemniscatic() {
            records.extend(build_z4_records(&ctx, &tet)?);
        }
        Ok(GaloisCatalog {
            curve: curve.clone(),
            uniformization: uni,
            tetrahedron: tet,
            records,
            tol,
            seed,
        })
    }

    pub fn context(&self) -> CertificateContext<'_> {
        CertificateContext {
            curve: &self.curve,
            uni: &self.uniformization,
            tol: self.tol,
            seed: self.seed,
        }
    }

    pub fn record(&self, label: LineLabel) -> Option<&GaloisLineRecord> {
        self.records.iter().find(|r| r.label == label)
    }

    /// Galois lines through a point, exactly for rational lines.
    pub fn lines_through(&self, p: &ProjPoint) -> Vec<LineLabel> {
        self.records
            .iter()
            .filter(|r| match r.line.contains_exact(p) {
                Some(b) => b,
                None => r.line.distance(&real_point(p)) < self.tol,
            })
            .map(|r| r.label)
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LinePairIncidence {
    pub lines: (LineLabel, LineLabel),
    pub meets: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<[f64; 2]>>,
    /// Index of the tetrahedron vertex at the meeting point, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
    /// Relative size of the smallest singular value of the four cutting planes.
    pub gap: f64,
    pub exact: bool,
    pub shared_elements: Vec<String>,
    /// Curve index of the involution with fixed points shared by both groups.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shared_involution: Option<usize>,
}

fn pair_incidence(cat: &GaloisCatalog, a: &GaloisLineRecord, b: &GaloisLineRecord) -> LinePairIncidence {
    let lat = cat.uniformization.lattice();
    let rows: Vec<Vec<Complex64>> = a.line.planes.iter().chain(&b.line.planes).map(|h| h.to_vec()).collect();
    let (sv, vecs) = svd_sorted(&rows, 4);
    let gap = sv[3] / sv[0];
    let (meets, point, vertex, exact) = match (a.line.as_gaussian(), b.line.as_gaussian()) {
        (Some(la), Some(lb)) => match meet_lines(&la, &lb) {
            Incidence::Point(p) => {
                let v = (0..4).find(|&k| cat.tetrahedron.vertices[k].map(|c| GaussRat::real(c.clone())) == p);
                (true, Some(p.coords().iter().map(GaussRat::to_complex).collect::<Vec<_>>()), v, true)
            }
            Incidence::Disjoint => (false, None, None, true),
            Incidence::Equal => (true, None, None, true),
        },
        _ => {
            if gap < cat.tol {
                let p = normalize(&vecs[3]);
                let v = (0..4).find(|&k| proportional(&p, &normalize(&real_point(&cat.tetrahedron.vertices[k]))).1 < cat.tol.sqrt());
                (true, Some(p), v, false)
            } else {
                (false, None, None, false)
            }
        }
    };
    let shared = group_intersection(lat, &a.group, &b.group);
    let shared_involution = shared
        .involutions_with_fixed_points(lat)
        .first()
        .and_then(|g| g.alpha.half_period_index())
        .map(|t| cat.uniformization.curve_involution(t));
    LinePairIncidence {
        lines: (a.label, b.label),
        meets,
        point: point.map(|p| cvec_json(&p)),
        vertex,
        gap,
        exact,
        shared_elements: shared.elements.iter().filter(|g| !g.is_identity()).map(|g| g.describe(lat)).collect(),
        shared_involution,
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VertexCount {
    pub vertex: usize,
    pub v4: usize,
    pub z4: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Counts {
    pub total: usize,
    pub v4: usize,
    pub z4: usize,
    pub per_vertex: Vec<VertexCount>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimKind {
    /// Failure means the computation could not be certified.
    Certificate,
    /// A statement about the arrangement, checked against the computation.
    Statement,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Claim {
    pub name: &'static str,
    pub kind: ClaimKind,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub detail: String,
}

impl Claim {
    fn new(name: &'static str, kind: ClaimKind, passed: bool, residual: Option<f64>, detail: String) -> Self {
        Claim {
            name,
            kind,
            status: if passed { "pass" } else { "fail" },
            residual,
            detail,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ArrangementReport {
    pub curve: EllipticCurveModel,
    pub tetrahedron: Tetrahedron,
    pub lines: Vec<GaloisLineRecord>,
    pub incidence: Vec<LinePairIncidence>,
    pub counts: Counts,
    pub claims: Vec<Claim>,
    pub discrepancies: Vec<String>,
}

impl ArrangementReport {
    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.name == name)
    }

    pub fn certificates_pass(&self) -> bool {
        self.claims.iter().filter(|c| c.kind == ClaimKind::Certificate).all(Claim::passed)
    }

    pub fn pair(&self, a: LineLabel, b: LineLabel) -> Option<&LinePairIncidence> {
        self.incidence.iter().find(|p| p.lines == (a, b) || p.lines == (b, a))
    }
}

pub fn arrangement_report(cat: &GaloisCatalog) -> ArrangementReport {
    let recs = &cat.records;
    let mut incidence = Vec::new();
    for (k, a) in recs.iter().enumerate() {
        for b in &recs[k + 1..] {
            incidence.push(pair_incidence(cat, a, b));
        }
    }
    let per_vertex: Vec<VertexCount> = (0..4)
        .map(|v| VertexCount {
            vertex: v,
            v4: recs.iter().filter(|r| r.kind == GroupKind::V4 && r.incident_vertices.contains(&v)).count(),
            z4: recs.iter().filter(|r| r.kind == GroupKind::Z4 && r.incident_vertices.contains(&v)).count(),
        })
        .collect();
    let counts = Counts {
        total: recs.len(),
        v4: recs.iter().filter(|r| r.kind == GroupKind::V4).count(),
        z4: recs.iter().filter(|r| r.kind == GroupKind::Z4).count(),
        per_vertex,
    };
    let lemn = cat.curve.is_lemniscatic();
    let mut claims = Vec::new();
    let mut discrepancies = Vec::new();

    let failed: Vec<String> = recs
        .iter()
        .filter_map(|r| r.certificate.first_failure().map(|c| format!("{}: {}", r.label, c.name)))
        .collect();
    claims.push(Claim::new(
        "line-certificates",
        ClaimKind::Certificate,
        failed.is_empty(),
        recs.iter()
            // the disjointness check reports a margin, not a residual
            .flat_map(|r| r.certificate.checks.iter().filter(|c| !c.name.starts_with("a-")).filter_map(|c| c.residual))
            .reduce(f64::max),
        if failed.is_empty() {
            format!("{} lines certified", recs.len())
        } else {
            failed.join("; ")
        },
    ));

    claims.push(Claim::new(
        "tetrahedron-non-coplanar",
        ClaimKind::Statement,
        !cat.tetrahedron.determinant.is_zero(),
        None,
        format!("vertex determinant {}", cat.tetrahedron.determinant),
    ));

    let (want_total, want_z4) = if lemn { (14, 8) } else { (6, 0) };
    claims.push(Claim::new(
        "line-count",
        ClaimKind::Statement,
        counts.total == want_total && counts.z4 == want_z4 && counts.v4 == 6,
        None,
        format!("{} Klein + {} cyclic lines", counts.v4, counts.z4),
    ));

    let want_z4_per_vertex = if lemn { 2 } else { 0 };
    let degrees_ok = counts.per_vertex.iter().all(|v| v.v4 == 3 && v.z4 == want_z4_per_vertex);
    claims.push(Claim::new(
        "vertex-degrees",
        ClaimKind::Statement,
        degrees_ok,
        None,
        counts
            .per_vertex
            .iter()
            .map(|v| format!("Q{}: {}+{}", v.vertex, v.v4, v.z4))
            .collect::<Vec<_>>()
            .join(", "),
    ));

    if lemn {
        // cyclic pairs sharing an involution meet at that involution's vertex
        let z4: Vec<&GaloisLineRecord> = recs.iter().filter(|r| r.kind == GroupKind::Z4).collect();
        let mut pairs_ok = true;
        let mut skew_ok = true;
        let mut worst: f64 = 0.0;
        let mut detail = Vec::new();
        for (k, a) in z4.iter().enumerate() {
            for b in &z4[k + 1..] {
                let inc = cat_pair(&incidence, a.label, b.label);
                match inc.shared_involution {
                    Some(i) => {
                        worst = worst.max(inc.gap);
                        let ok = inc.meets && inc.vertex == Some(i);
                        pairs_ok &= ok;
                        detail.push(format!("{}∩{} = {}", a.label, b.label, inc.vertex.map_or("off-vertex".to_string(), |v| format!("Q{v}"))));
                    }
                    None => {
                        let ok = !inc.meets || inc.vertex.is_some();
                        skew_ok &= !inc.meets;
                        if !ok {
                            detail.push(format!("{}∩{} off the vertices", a.label, b.label));
                        }
                    }
                }
            }
        }
        claims.push(Claim::new("cyclic-pairs-meet-at-vertices", ClaimKind::Statement, pairs_ok, Some(worst), detail.join(", ")));
        claims.push(Claim::new(
            "unpaired-cyclic-lines-skew",
            ClaimKind::Statement,
            skew_ok,
            None,
            "cyclic lines without a shared involution do not meet".into(),
        ));
        let recovered = z4.iter().filter(|r| r.line.gaussian.is_some()).count();
        if recovered < z4.len() {
            discrepancies.push(format!(
                "{recovered} of 8 cyclic lines round to exact Q(i) data; the rest keep numeric certificates"
            ));
        }
    }

    // distinct lines carry distinct matrix groups
    let mut rho_ok = true;
    let mut rho_gap = f64::INFINITY;
    for (k, a) in recs.iter().enumerate() {
        for b in &recs[k + 1..] {
            let same = a.realization.iter().all(|x| {
                b.realization.iter().any(|y| x.matrix.same_as(&y.matrix, cat.tol).0)
            });
            rho_ok &= !same;
            let d = a
                .realization
                .iter()
                .filter(|x| !x.automorphism.is_identity())
                .map(|x| {
                    b.realization
                        .iter()
                        .map(|y| projective_distance(&x.matrix.to_numeric(), &y.matrix.to_numeric()))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max);
            rho_gap = rho_gap.min(d);
        }
    }
    claims.push(Claim::new(
        "groups-distinguish-lines",
        ClaimKind::Statement,
        rho_ok,
        Some(rho_gap),
        "no two lines carry the same matrix group".into(),
    ));

    // the group-theoretic reading of incidence
    let mut literal_disjoint = Vec::new();
    let mut off_vertex = Vec::new();
    let mut no_shared = Vec::new();
    let mut iff_bad = Vec::new();
    for inc in &incidence {
        let name = format!("{}/{}", inc.lines.0, inc.lines.1);
        if !inc.meets && !inc.shared_elements.is_empty() {
            literal_disjoint.push(format!("{name} share {}", inc.shared_elements.join(",")));
        }
        if inc.meets && inc.vertex.is_none() {
            off_vertex.push(format!("{name} at {}", fmt_point(inc.point.as_deref())));
        }
        if inc.meets && inc.shared_involution.is_none() {
            no_shared.push(name.clone());
        }
        let iff = inc.meets == inc.shared_involution.is_some() && (!inc.meets || inc.vertex == inc.shared_involution);
        if !iff {
            iff_bad.push(name);
        }
    }
    claims.push(Claim::new(
        "disjoint-lines-share-only-identity",
        ClaimKind::Statement,
        literal_disjoint.is_empty(),
        None,
        if literal_disjoint.is_empty() {
            "every disjoint pair has trivial group intersection".into()
        } else {
            literal_disjoint.join("; ")
        },
    ));
    claims.push(Claim::new(
        "meeting-points-are-cone-vertices",
        ClaimKind::Statement,
        off_vertex.is_empty(),
        None,
        if off_vertex.is_empty() { "all meetings at vertices".into() } else { off_vertex.join("; ") },
    ));
    claims.push(Claim::new(
        "meeting-lines-share-an-involution",
        ClaimKind::Statement,
        no_shared.is_empty(),
        None,
        if no_shared.is_empty() {
            "every meeting pair shares an involution with fixed points".into()
        } else {
            format!("trivial intersection for {}", no_shared.join(", "))
        },
    ));
    claims.push(Claim::new(
        "incidence-iff-shared-involution",
        ClaimKind::Statement,
        iff_bad.is_empty(),
        None,
        if iff_bad.is_empty() {
            "lines meet exactly when their groups share an involution with fixed points, at its cone vertex".into()
        } else {
            format!("fails for {}", iff_bad.join(", "))
        },
    ));

    if !literal_disjoint.is_empty() {
        discrepancies.push(
            "Opposite tetrahedron edges are disjoint, yet their groups share a translation by a 2-torsion point. \
             The translation fixes both lines pointwise with different eigenvalues, so it is not the identity of P3. \
             The correct reading is that disjoint lines share no involution with fixed points."
                .into(),
        );
    }
    if !off_vertex.is_empty() {
        discrepancies.push(format!(
            "Klein and cyclic lines meet away from the tetrahedron vertices, with trivial group intersection: {}. \
             A center at such a point projects the curve to a plane quartic of genus one with two outer Galois points.",
            off_vertex.join("; ")
        ));
    }
    if recs.iter().any(|r| !r.certificate.fixes_line_pointwise) {
        discrepancies.push(
            "Group elements do not fix their Galois line pointwise: sigma0 = diag(1,1,1,-1) acts on Q0Q1 with eigenvalues -1 at Q0 and 1 at Q1. \
             Each element fixes every plane through the line instead, which is what the certificate checks."
                .into(),
        );
    }
    discrepancies.push(
        "The fixed field of <sigma0, sigma_i> is generated by (x^2 + c_i)/(x - e_i); the variant with denominator x - c_i is not invariant."
            .into(),
    );

    ArrangementReport {
        curve: cat.curve.clone(),
        tetrahedron: cat.tetrahedron.clone(),
        lines: recs.clone(),
        incidence,
        counts,
        claims,
        discrepancies,
    }
}

fn cat_pair(incidence: &[LinePairIncidence], a: LineLabel, b: LineLabel) -> &LinePairIncidence {
    incidence
        .iter()
        .find(|p| p.lines == (a, b) || p.lines == (b, a))
        .expect("all pairs computed")
}

fn fmt_point(p: Option<&[[f64; 2]]>) -> String {
    let Some(p) = p else { return "?".into() };
    // scale so the largest coordinate is 1 and print real parts when possible
    let (k, _) = p
        .iter()
        .enumerate()
        .max_by(|a, b| (a.1[0].hypot(a.1[1])).partial_cmp(&b.1[0].hypot(b.1[1])).unwrap())
        .unwrap();
    let piv = c64(p[k][0], p[k][1]);
    let coords: Vec<String> = p
        .iter()
        .map(|c| {
            let z = c64(c[0], c[1]) / piv;
            let clean = |x: f64| if x.abs() < 1e-9 { 0.0 } else { x };
            if z.im.abs() < 1e-9 {
                format!("{}", clean(z.re))
            } else {
                format!("{}{:+}i", clean(z.re), clean(z.im))
            }
        })
        .collect();
    format!("({})", coords.join(":"))
}
