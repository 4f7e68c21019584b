//! The analytic side: the torus `ℂ/ℒ`, its affine automorphisms
//! `z ↦ εz + α`, the order-4 groups whose orbits are hyperplane sections,
//! and the Weierstrass functions realizing torus points on the quartic.
//!
//! Group theory is exact: `α` is kept as rational lattice coordinates and
//! `ε` as a power of a generator of the lattice's unit group. Only `℘`
//! is evaluated in floating point.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::curve::EllipticCurveModel;
use crate::error::Error;
use crate::exact::Scalar;

const INT_TOL: f64 = 1e-9;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn near_int(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() < INT_TOL).then_some(r as i64)
}

/// Integer 2×2 matrix acting on lattice coordinates `(r, s)` of `r + sω`.
type IntMat = [[i64; 2]; 2];

fn mat_mul(a: &IntMat, b: &IntMat) -> IntMat {
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

const IDENTITY: IntMat = [[1, 0], [0, 1]];

/// The lattice `scale·(ℤ + ℤω)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexLattice {
    omega: Complex64,
    scale: Complex64,
    symmetry_order: usize,
    /// Matrix of multiplication by the unit-group generator, columns are
    /// the images of `1` and `ω` in `(r, s)` coordinates.
    unit: IntMat,
}

impl ComplexLattice {
    pub fn new(omega: Complex64) -> Result<Self, Error> {
        Self::with_scale(omega, c64(1.0, 0.0))
    }

    pub fn with_scale(omega: Complex64, scale: Complex64) -> Result<Self, Error> {
        if omega.im.is_nan() || omega.im <= 0.0 || !omega.re.is_finite() {
            return Err(Error::InvalidInput(format!("lattice parameter {omega} must have positive imaginary part")));
        }
        if scale.norm() == 0.0 || !scale.norm().is_finite() {
            return Err(Error::InvalidInput("lattice scale must be a nonzero finite number".into()));
        }
        let zeta6 = Complex64::from_polar(1.0, PI / 3.0);
        let (symmetry_order, unit) = if let Some(m) = unit_matrix(omega, zeta6) {
            (6, m)
        } else if let Some(m) = unit_matrix(omega, c64(0.0, 1.0)) {
            (4, m)
        } else {
            (2, [[-1, 0], [0, -1]])
        };
        Ok(ComplexLattice {
            omega,
            scale,
            symmetry_order,
            unit,
        })
    }

    pub fn square() -> Self {
        Self::new(c64(0.0, 1.0)).expect("valid")
    }

    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    pub fn scale(&self) -> Complex64 {
        self.scale
    }

    /// Order of the group of units `ε` with `εℒ = ℒ`: 2, 4 or 6.
    pub fn symmetry_order(&self) -> usize {
        self.symmetry_order
    }

    /// The generator `−1`, `i` or `e^{iπ/3}` of the unit group.
    pub fn unit_generator(&self) -> Complex64 {
        match self.symmetry_order {
            6 => Complex64::from_polar(1.0, PI / 3.0),
            4 => c64(0.0, 1.0),
            _ => c64(-1.0, 0.0),
        }
    }

    fn unit_power(&self, k: usize) -> IntMat {
        (0..k).fold(IDENTITY, |acc, _| mat_mul(&self.unit, &acc))
    }

    /// `scale·(r + sω)`.
    pub fn point(&self, r: f64, s: f64) -> Complex64 {
        self.scale * (c64(r, 0.0) + self.omega * s)
    }

    /// Real lattice coordinates `(r, s)` of `z`.
    pub fn coordinates(&self, z: Complex64) -> (f64, f64) {
        let u = z / self.scale;
        let s = u.im / self.omega.im;
        (u.re - s * self.omega.re, s)
    }

    /// Representative of `z mod ℒ` with lattice coordinates in `[-1/2, 1/2]`.
    pub fn reduce(&self, z: Complex64) -> Complex64 {
        let (r, s) = self.coordinates(z);
        self.point(r - r.round(), s - s.round())
    }

    /// Distance from `z` to the nearest lattice point, in lattice coordinates.
    pub fn lattice_distance(&self, z: Complex64) -> f64 {
        let (r, s) = self.coordinates(z);
        (r - r.round()).abs().max((s - s.round()).abs())
    }

    /// Gauss-reduced basis `(w₁, w₂)`: `w₁` is a shortest vector and
    /// `τ = w₂/w₁` lies in the standard fundamental domain.
    pub fn reduced_basis(&self) -> (Complex64, Complex64) {
        let mut w1 = self.scale;
        let mut w2 = self.scale * self.omega;
        for _ in 0..200 {
            if w2.norm_sqr() < w1.norm_sqr() {
                std::mem::swap(&mut w1, &mut w2);
            }
            let mu = ((w2 * w1.conj()).re / w1.norm_sqr()).round();
            if mu == 0.0 {
                break;
            }
            w2 -= w1 * mu;
        }
        if (w2 / w1).im < 0.0 {
            w2 = -w2;
        }
        (w1, w2)
    }

    /// Invariants `(g₂, g₃)` from the Eisenstein series `E₄`, `E₆`.
    pub fn invariants(&self) -> (Complex64, Complex64) {
        let (w1, w2) = self.reduced_basis();
        let tau = w2 / w1;
        let q = (c64(0.0, 2.0 * PI) * tau).exp();
        let mut e4 = c64(1.0, 0.0);
        let mut e6 = c64(1.0, 0.0);
        let mut qn = c64(1.0, 0.0);
        for n in 1..=40u64 {
            qn *= q;
            if qn.norm() < 1e-30 {
                break;
            }
            let (s3, s5) = divisor_sums(n);
            e4 += qn * (240.0 * s3);
            e6 -= qn * (504.0 * s5);
        }
        let g4 = e4 * (PI.powi(4) / 45.0);
        let g6 = e6 * (2.0 * PI.powi(6) / 945.0);
        (g4 * 60.0 / w1.powi(4), g6 * 140.0 / w1.powi(6))
    }
}

fn unit_matrix(omega: Complex64, u: Complex64) -> Option<IntMat> {
    let coords = |z: Complex64| {
        let s = z.im / omega.im;
        (z.re - s * omega.re, s)
    };
    let (a, b) = coords(u);
    let (c, d) = coords(u * omega);
    Some([[near_int(a)?, near_int(c)?], [near_int(b)?, near_int(d)?]])
}

fn divisor_sums(n: u64) -> (f64, f64) {
    (1..=n).filter(|d| n.is_multiple_of(*d)).fold((0.0, 0.0), |(s3, s5), d| {
        let d = d as f64;
        (s3 + d.powi(3), s5 + d.powi(5))
    })
}

/// `α = r + sω` modulo `ℒ`, with `0 ≤ r, s < 1` exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeFraction {
    pub r: Scalar,
    pub s: Scalar,
}

impl LatticeFraction {
    pub fn new(r: Scalar, s: Scalar) -> Self {
        LatticeFraction {
            r: r.fract(),
            s: s.fract(),
        }
    }

    pub fn zero() -> Self {
        Self::new(Scalar::zero(), Scalar::zero())
    }

    pub fn quarters(m: i64, n: i64) -> Self {
        Self::new(Scalar::new(m, 4), Scalar::new(n, 4))
    }

    pub fn halves(m: i64, n: i64) -> Self {
        Self::new(Scalar::new(m, 2), Scalar::new(n, 2))
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.r + &other.r, &self.s + &other.s)
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.r, -&self.s)
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let k = Scalar::from_int(k);
        Self::new(&self.r * &k, &self.s * &k)
    }

    fn transform(&self, m: &IntMat) -> Self {
        let [[a, c], [b, d]] = *m;
        let (a, b, c, d) = (
            Scalar::from_int(a),
            Scalar::from_int(b),
            Scalar::from_int(c),
            Scalar::from_int(d),
        );
        Self::new(&a * &self.r + &c * &self.s, &b * &self.r + &d * &self.s)
    }

    pub fn to_complex(&self, lat: &ComplexLattice) -> Complex64 {
        lat.point(self.r.to_f64(), self.s.to_f64())
    }

    /// Index `0..=3` of a 2-torsion class: `0, 1/2, ω/2, (1+ω)/2`.
    pub fn half_period_index(&self) -> Option<usize> {
        let half = Scalar::new(1, 2);
        let code = |x: &Scalar| {
            if x.is_zero() {
                Some(0)
            } else if *x == half {
                Some(1)
            } else {
                None
            }
        };
        match (code(&self.r)?, code(&self.s)?) {
            (0, 0) => Some(0),
            (1, 0) => Some(1),
            (0, 1) => Some(2),
            _ => Some(3),
        }
    }
}

impl fmt::Display for LatticeFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.r.is_zero(), self.s.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.r),
            (true, false) => write!(f, "{}w", self.s),
            (false, false) => write!(f, "{}+{}w", self.r, self.s),
        }
    }
}

/// `z ↦ u^k z + α`, `u` the unit-group generator of the lattice.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TorusAutomorphism {
    pub eps_power: usize,
    pub alpha: LatticeFraction,
}

impl TorusAutomorphism {
    pub fn new(lat: &ComplexLattice, eps_power: usize, alpha: LatticeFraction) -> Self {
        TorusAutomorphism {
            eps_power: eps_power % lat.symmetry_order,
            alpha,
        }
    }

    pub fn identity() -> Self {
        TorusAutomorphism {
            eps_power: 0,
            alpha: LatticeFraction::zero(),
        }
    }

    /// `σ₀ = −z`, `σ₁ = −z + 1/2`, `σ₂ = −z + ω/2`, `σ₃ = −z + (1+ω)/2`.
    pub fn involution(lat: &ComplexLattice, index: usize) -> Self {
        let (m, n) = [(0, 0), (1, 0), (0, 1), (1, 1)][index];
        Self::new(lat, lat.symmetry_order / 2, LatticeFraction::halves(m, n))
    }

    pub fn translation(alpha: LatticeFraction) -> Self {
        TorusAutomorphism { eps_power: 0, alpha }
    }

    pub fn is_identity(&self) -> bool {
        self.eps_power == 0 && self.alpha.is_zero()
    }

    pub fn is_translation(&self) -> bool {
        self.eps_power == 0
    }

    /// `(ε₁, α₁) ∘ (ε₂, α₂) = (ε₁ε₂, ε₁α₂ + α₁)`.
    pub fn compose(&self, lat: &ComplexLattice, other: &Self) -> Self {
        let rotated = other.alpha.transform(&lat.unit_power(self.eps_power));
        Self::new(lat, self.eps_power + other.eps_power, rotated.add(&self.alpha))
    }

    pub fn order(&self, lat: &ComplexLattice) -> usize {
        let mut g = self.clone();
        let mut k = 1;
        while !g.is_identity() {
            g = self.compose(lat, &g);
            k += 1;
            assert!(k <= 64, "torus automorphism of unbounded order");
        }
        k
    }

    pub fn epsilon(&self, lat: &ComplexLattice) -> Complex64 {
        lat.unit_generator().powu(self.eps_power as u32)
    }

    pub fn apply(&self, lat: &ComplexLattice, z: Complex64) -> Complex64 {
        self.epsilon(lat) * z + self.alpha.to_complex(lat)
    }

    pub fn describe(&self, lat: &ComplexLattice) -> String {
        let eps = match (lat.symmetry_order, self.eps_power) {
            (_, 0) => "".to_string(),
            (n, k) if 2 * k == n => "-".to_string(),
            (4, 1) => "i".to_string(),
            (4, 3) => "-i".to_string(),
            (_, k) => format!("u^{k}"),
        };
        if self.alpha.is_zero() {
            format!("{eps}z")
        } else {
            format!("{eps}z+{}", self.alpha)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupKind {
    V4,
    Z4,
    Other,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::V4 => write!(f, "V4"),
            GroupKind::Z4 => write!(f, "Z4"),
            GroupKind::Other => write!(f, "other"),
        }
    }
}

impl Serialize for GroupKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// `G_ij = ⟨σᵢ, σⱼ⟩`, `G_mn = ⟨iz + (m + nω)/4⟩`, or anything else.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupLabel {
    V4(usize, usize),
    Z4(i64, i64),
    Trivial,
    Involution(usize),
    Other(String),
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupLabel::V4(i, j) => write!(f, "G{i}{j}"),
            GroupLabel::Z4(m, n) => write!(f, "G({m},{n})"),
            GroupLabel::Trivial => write!(f, "trivial"),
            GroupLabel::Involution(i) => write!(f, "<sigma{i}>"),
            GroupLabel::Other(s) => write!(f, "{s}"),
        }
    }
}

impl Serialize for GroupLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A finite group of torus automorphisms, kept as a sorted element set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismGroup {
    pub elements: Vec<TorusAutomorphism>,
    pub label: GroupLabel,
    pub kind: GroupKind,
}

impl AutomorphismGroup {
    pub fn from_elements(lat: &ComplexLattice, elements: impl IntoIterator<Item = TorusAutomorphism>) -> Self {
        let set: BTreeSet<TorusAutomorphism> = elements.into_iter().collect();
        let elements: Vec<_> = set.into_iter().collect();
        let kind = match elements.len() {
            4 if elements.iter().any(|g| g.order(lat) == 4) => GroupKind::Z4,
            4 => GroupKind::V4,
            _ => GroupKind::Other,
        };
        let label = label_for(lat, &elements, kind);
        AutomorphismGroup {
            elements,
            label,
            kind,
        }
    }

    /// Closure of the generators under composition.
    pub fn generated_by(lat: &ComplexLattice, gens: &[TorusAutomorphism]) -> Self {
        let mut set: BTreeSet<TorusAutomorphism> = BTreeSet::new();
        set.insert(TorusAutomorphism::identity());
        let mut frontier: Vec<TorusAutomorphism> = vec![TorusAutomorphism::identity()];
        while let Some(h) = frontier.pop() {
            for g in gens {
                let n = g.compose(lat, &h);
                if set.insert(n.clone()) {
                    frontier.push(n);
                }
            }
        }
        Self::from_elements(lat, set)
    }

    /// `⟨σᵢ, σⱼ⟩`.
    pub fn v4(lat: &ComplexLattice, i: usize, j: usize) -> Self {
        Self::generated_by(
            lat,
            &[
                TorusAutomorphism::involution(lat, i),
                TorusAutomorphism::involution(lat, j),
            ],
        )
    }

    /// `⟨iz + (m + nω)/4⟩` on a square lattice.
    pub fn z4(lat: &ComplexLattice, m: i64, n: i64) -> Result<Self, Error> {
        if lat.symmetry_order != 4 {
            return Err(Error::UnsupportedGroup("Z4 groups need a square lattice".into()));
        }
        Ok(Self::generated_by(
            lat,
            &[TorusAutomorphism::new(lat, 1, LatticeFraction::quarters(m, n))],
        ))
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &TorusAutomorphism) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    /// The `ε = −1` elements, i.e. involutions with fixed points.
    pub fn involutions_with_fixed_points(&self, lat: &ComplexLattice) -> Vec<&TorusAutomorphism> {
        let half = lat.symmetry_order / 2;
        self.elements.iter().filter(|g| g.eps_power == half).collect()
    }

    pub fn is_closed(&self, lat: &ComplexLattice) -> bool {
        self.elements
            .iter()
            .all(|g| self.elements.iter().all(|h| self.contains(&g.compose(lat, h))))
    }

    pub fn describe(&self, lat: &ComplexLattice) -> Vec<String> {
        self.elements.iter().map(|g| g.describe(lat)).collect()
    }
}

fn label_for(lat: &ComplexLattice, elements: &[TorusAutomorphism], kind: GroupKind) -> GroupLabel {
    let half = lat.symmetry_order / 2;
    let invs: Vec<usize> = elements
        .iter()
        .filter(|g| g.eps_power == half)
        .filter_map(|g| g.alpha.half_period_index())
        .collect();
    match (kind, elements.len()) {
        (_, 1) => GroupLabel::Trivial,
        (_, 2) if invs.len() == 1 => GroupLabel::Involution(invs[0]),
        (GroupKind::V4, _) if invs.len() == 2 => GroupLabel::V4(invs[0].min(invs[1]), invs[0].max(invs[1])),
        (GroupKind::Z4, _) if lat.symmetry_order == 4 && elements.iter().any(|g| g.eps_power == 1) => {
            let g = elements.iter().find(|g| g.eps_power == 1).expect("checked");
            let four = Scalar::from_int(4);
            let m = (&g.alpha.r * &four).numer().try_into().unwrap_or(-1);
            let n = (&g.alpha.s * &four).numer().try_into().unwrap_or(-1);
            if (&g.alpha.r * &four).is_integer() && (&g.alpha.s * &four).is_integer() {
                GroupLabel::Z4(m, n)
            } else {
                GroupLabel::Other(format!("<{}>", g.describe(lat)))
            }
        }
        _ => GroupLabel::Other(format!(
            "{{{}}}",
            elements.iter().map(|g| g.describe(lat)).collect::<Vec<_>>().join(", ")
        )),
    }
}

impl Serialize for AutomorphismGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("AutomorphismGroup", 3)?;
        st.serialize_field("label", &self.label)?;
        st.serialize_field("kind", &self.kind)?;
        let elems: Vec<(usize, String, String)> = self
            .elements
            .iter()
            .map(|g| (g.eps_power, g.alpha.r.to_string(), g.alpha.s.to_string()))
            .collect();
        st.serialize_field("elements", &elems)?;
        st.end()
    }
}

/// The orbit of every point is a hyperplane section and the quotient is
/// rational: `Σ ε = 0`, `Σ α ≡ 0 (mod ℒ)`, and some `ε ≠ 1`.
///
/// For `G = {z ↦ εₜz + αₜ}` the orbit of `z` sums to `(Σεₜ)z + Σαₜ`; it
/// is independent of `z` and `≡ 0` exactly under the first two conditions,
/// which by Abel's theorem is linear equivalence of every orbit with `4P₀`.
pub fn diamond_check(lat: &ComplexLattice, g: &AutomorphismGroup) -> bool {
    let mut eps_sum = [[0i64; 2]; 2];
    let mut alpha_sum = LatticeFraction::zero();
    for t in &g.elements {
        let m = lat.unit_power(t.eps_power);
        for i in 0..2 {
            for j in 0..2 {
                eps_sum[i][j] += m[i][j];
            }
        }
        alpha_sum = alpha_sum.add(&t.alpha);
    }
    eps_sum == [[0, 0], [0, 0]] && alpha_sum.is_zero() && g.elements.iter().any(|t| t.eps_power != 0)
}

/// All elements `z ↦ εz + α` with `α ∈ ¼ℒ/ℒ`.
pub fn candidate_elements(lat: &ComplexLattice) -> Vec<TorusAutomorphism> {
    let mut out = Vec::new();
    for k in 0..lat.symmetry_order {
        for m in 0..4 {
            for n in 0..4 {
                out.push(TorusAutomorphism::new(lat, k, LatticeFraction::quarters(m, n)));
            }
        }
    }
    out
}

/// Every order-4 subgroup of the candidate group, whether or not it passes
/// [`diamond_check`].
pub fn order_four_subgroups(lat: &ComplexLattice) -> Vec<AutomorphismGroup> {
    let elems = candidate_elements(lat);
    let mut seen: BTreeSet<Vec<TorusAutomorphism>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |g: AutomorphismGroup| {
        if g.order() == 4 && seen.insert(g.elements.clone()) {
            out.push(g);
        }
    };
    let orders: Vec<usize> = elems.iter().map(|g| g.order(lat)).collect();
    for (g, &o) in elems.iter().zip(&orders) {
        if o == 4 {
            push(AutomorphismGroup::generated_by(lat, std::slice::from_ref(g)));
        }
    }
    for (a, (g, &og)) in elems.iter().zip(&orders).enumerate() {
        if og != 2 {
            continue;
        }
        for (h, &oh) in elems.iter().zip(&orders).skip(a + 1) {
            if oh == 2 && g.compose(lat, h) == h.compose(lat, g) {
                push(AutomorphismGroup::generated_by(lat, &[g.clone(), h.clone()]));
            }
        }
    }
    out
}

/// The order-4 groups passing [`diamond_check`], Klein groups first.
///
/// Restricting `α` to `¼ℒ` loses nothing: a Klein group passing the check
/// has its involutions at half periods, and a cyclic one generated by
/// `iz + α` needs `2(1+i)α ∈ ℒ`, so `α ∈ (1−i)/4·ℒ ⊂ ¼ℒ`.
pub fn enumerate_galois_groups(lat: &ComplexLattice) -> Vec<AutomorphismGroup> {
    let mut groups: Vec<_> = order_four_subgroups(lat)
        .into_iter()
        .filter(|g| diamond_check(lat, g))
        .collect();
    groups.sort_by(|a, b| (a.kind, &a.label).cmp(&(b.kind, &b.label)));
    groups
}

pub fn group_intersection(lat: &ComplexLattice, g1: &AutomorphismGroup, g2: &AutomorphismGroup) -> AutomorphismGroup {
    AutomorphismGroup::from_elements(lat, g1.elements.iter().filter(|g| g2.contains(g)).cloned())
}

/// `℘(z)` and `℘′(z)` for the lattice.
pub fn wp_eval(lat: &ComplexLattice, z: Complex64) -> Result<(Complex64, Complex64), Error> {
    WpEvaluator::new(lat).eval(z)
}

/// Reusable `℘` evaluator: caches the invariants and Laurent coefficients.
#[derive(Clone, Debug)]
pub struct WpEvaluator {
    lat: ComplexLattice,
    g2: Complex64,
    g3: Complex64,
    coeffs: Vec<Complex64>,
    radius: f64,
}

const LAURENT_TERMS: usize = 48;

impl WpEvaluator {
    pub fn new(lat: &ComplexLattice) -> Self {
        let (g2, g3) = lat.invariants();
        let (w1, _) = lat.reduced_basis();
        let mut coeffs = vec![c64(0.0, 0.0); LAURENT_TERMS + 1];
        coeffs[1] = g2 / 20.0;
        coeffs[2] = g3 / 28.0;
        for k in 3..=LAURENT_TERMS {
            let mut s = c64(0.0, 0.0);
            for m in 1..=k - 2 {
                s += coeffs[m] * coeffs[k - 1 - m];
            }
            coeffs[k] = s * (3.0 / ((2 * k + 3) as f64 * (k - 2) as f64));
        }
        WpEvaluator {
            lat: lat.clone(),
            g2,
            g3,
            coeffs,
            radius: 0.2 * w1.norm(),
        }
    }

    pub fn g2(&self) -> Complex64 {
        self.g2
    }

    pub fn g3(&self) -> Complex64 {
        self.g3
    }

    pub fn lattice(&self) -> &ComplexLattice {
        &self.lat
    }

    fn laurent(&self, z: Complex64) -> (Complex64, Complex64) {
        let z2 = z * z;
        let mut wp = c64(0.0, 0.0);
        let mut dwp = c64(0.0, 0.0);
        for k in (1..=LAURENT_TERMS).rev() {
            wp = wp * z2 + self.coeffs[k];
            dwp = dwp * z2 + self.coeffs[k] * (2 * k) as f64;
        }
        // wp = Σ c_k z^{2k-2}, dwp = Σ 2k c_k z^{2k-2}
        (z2.inv() + wp * z2, -2.0 * z2.inv() / z + dwp * z)
    }

    pub fn eval(&self, z: Complex64) -> Result<(Complex64, Complex64), Error> {
        if self.lat.lattice_distance(z) < 1e-12 {
            return Err(Error::Pole { tol: 1e-12 });
        }
        let mut w = self.lat.reduce(z);
        let mut halvings = 0;
        while w.norm() > self.radius {
            w /= 2.0;
            halvings += 1;
        }
        let (mut x, mut y) = self.laurent(w);
        for _ in 0..halvings {
            let m = (6.0 * x * x - self.g2 / 2.0) / y;
            let x3 = m * m / 4.0 - 2.0 * x;
            let y3 = -(y + m * (x3 - x));
            x = x3;
            y = y3;
        }
        Ok((x, y))
    }
}

/// `(1 : ℘² : ℘ : ℘′)` on the unit sphere, with `α ≡ 0` sent to `(0:1:0:0)`.
pub fn torus_point_with(ev: &WpEvaluator, alpha: Complex64) -> [Complex64; 4] {
    let zero = c64(0.0, 0.0);
    if ev.lat.lattice_distance(alpha) < 1e-12 {
        return [zero, c64(1.0, 0.0), zero, zero];
    }
    let (x, y) = ev.eval(alpha).expect("checked away from the lattice");
    let v = if x.norm() > 1.0 {
        let xi = x.inv();
        [xi * xi, c64(1.0, 0.0), xi, y * xi * xi]
    } else {
        [c64(1.0, 0.0), x * x, x, y]
    };
    normalize4(v)
}

pub fn torus_point(lat: &ComplexLattice, alpha: Complex64) -> [Complex64; 4] {
    torus_point_with(&WpEvaluator::new(lat), alpha)
}

pub(crate) fn normalize4(v: [Complex64; 4]) -> [Complex64; 4] {
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.map(|c| c / n)
}

/// Whether `Σ αᵢ ≡ 0 (mod ℒ)` within `tol` in lattice coordinates.
pub fn abel_equivalent(lat: &ComplexLattice, alphas: &[Complex64], tol: f64) -> bool {
    let sum: Complex64 = alphas.iter().sum();
    lat.lattice_distance(sum) < tol
}

/// The shift `β = −Σαᵢ/n` with `Σ(αᵢ + β) = 0`.
pub fn normalize_divisor(alphas: &[Complex64]) -> Complex64 {
    -alphas.iter().sum::<Complex64>() / alphas.len() as f64
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..100 {
        if (a - b).abs() <= 1e-16 * a.abs() {
            break;
        }
        let (na, nb) = ((a + b) / 2.0, (a * b).sqrt());
        a = na;
        b = nb;
    }
    a
}

/// The analytic uniformization of a curve with real roots: the period
/// lattice `2ω₁(ℤ + ℤτ)` and the matching of half periods with roots.
#[derive(Clone, Debug)]
pub struct Uniformization {
    pub evaluator: WpEvaluator,
    /// `half_period_root[t − 1]` is the index of the root `e` with
    /// `℘(h_t) = e` for `h₁ = 1/2`, `h₂ = ω/2`, `h₃ = (1+ω)/2`.
    pub half_period_root: [usize; 3],
}

impl Uniformization {
    pub fn from_curve(curve: &EllipticCurveModel) -> Result<Self, Error> {
        let e: Vec<f64> = curve.e().iter().map(|x| x.to_f64()).collect();
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| e[b].partial_cmp(&e[a]).expect("finite roots"));
        let (hi, mid, lo) = (e[order[0]], e[order[1]], e[order[2]]);
        let w1 = PI / (2.0 * agm((hi - lo).sqrt(), (hi - mid).sqrt()));
        let w3 = PI / (2.0 * agm((hi - lo).sqrt(), (mid - lo).sqrt()));
        let lat = ComplexLattice::with_scale(c64(0.0, w3 / w1), c64(2.0 * w1, 0.0))?;
        let evaluator = WpEvaluator::new(&lat);
        let mut half_period_root = [0; 3];
        for (t, slot) in half_period_root.iter_mut().enumerate() {
            let h = LatticeFraction::halves([1, 0, 1][t], [0, 1, 1][t]).to_complex(&lat);
            let (x, _) = evaluator.eval(h)?;
            *slot = (0..3)
                .min_by(|&a, &b| (x.re - e[a]).abs().partial_cmp(&(x.re - e[b]).abs()).unwrap())
                .unwrap();
        }
        Ok(Uniformization {
            evaluator,
            half_period_root,
        })
    }

    pub fn lattice(&self) -> &ComplexLattice {
        &self.evaluator.lat
    }

    /// Curve point for the lattice-coordinate argument `(r, s)`.
    pub fn point(&self, r: f64, s: f64) -> [Complex64; 4] {
        torus_point_with(&self.evaluator, self.lattice().point(r, s))
    }

    /// Torus involution index `t` to curve involution index `σ_{1+root}`.
    pub fn curve_involution(&self, t: usize) -> usize {
        if t == 0 {
            0
        } else {
            1 + self.half_period_root[t - 1]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::curve_from_roots;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hex() -> ComplexLattice {
        ComplexLattice::new(Complex64::from_polar(1.0, PI / 3.0)).unwrap()
    }

    /// Row-by-row lattice sum: each row `m + nω` is summed in closed form
    /// by `Σ_m (u − m)⁻² = π²/sin²(πu)`.
    fn wp_lattice_sum(lat: &ComplexLattice, z: Complex64) -> (Complex64, Complex64) {
        let u = z / lat.scale();
        let tau = lat.omega();
        let pi = c64(PI, 0.0);
        let csc2 = |v: Complex64| (pi * pi) / ((pi * v).sin() * (pi * v).sin());
        let dcsc2 = |v: Complex64| -2.0 * pi * pi * pi * (pi * v).cos() / (pi * v).sin().powi(3);
        let mut wp = csc2(u) - pi * pi / 3.0;
        let mut dwp = dcsc2(u);
        // row n contributes O(e^{-2πn Im ω}); stop before sin overflows
        for n in (1..60).take_while(|&n| n as f64 * tau.im < 12.0) {
            for sgn in [-1.0, 1.0] {
                let nt = tau * (sgn * n as f64);
                wp += csc2(u - nt) - csc2(nt);
                dwp += dcsc2(u - nt);
            }
        }
        let s = lat.scale();
        (wp / (s * s), dwp / (s * s * s))
    }

    #[test]
    fn symmetry_orders() {
        assert_eq!(ComplexLattice::square().symmetry_order(), 4);
        assert_eq!(ComplexLattice::new(c64(0.0, 2.0)).unwrap().symmetry_order(), 2);
        assert_eq!(hex().symmetry_order(), 6);
        assert_eq!(ComplexLattice::new(c64(1.0, 1.0)).unwrap().symmetry_order(), 4);
        assert_eq!(ComplexLattice::new(c64(-0.5, 3f64.sqrt() / 2.0)).unwrap().symmetry_order(), 6);
        assert!(ComplexLattice::new(c64(1.0, -1.0)).is_err());
    }

    #[test]
    fn square_lattice_invariants() {
        let (g2, g3) = ComplexLattice::square().invariants();
        assert!((g2.re - 189.072_720_129_233_85).abs() < 1e-9, "{g2}");
        assert!(g2.im.abs() < 1e-9 && g3.norm() < 1e-9);
    }

    #[test]
    fn count_groups() {
        let groups = enumerate_galois_groups(&ComplexLattice::new(c64(0.0, 2.0)).unwrap());
        let labels: Vec<String> = groups.iter().map(|g| g.label.to_string()).collect();
        assert_eq!(labels, ["G01", "G02", "G03", "G12", "G13", "G23"]);

        let sq = ComplexLattice::square();
        let groups = enumerate_galois_groups(&sq);
        assert_eq!(groups.len(), 14);
        let mut z4: Vec<(i64, i64)> = groups
            .iter()
            .filter_map(|g| match g.label {
                GroupLabel::Z4(m, n) => Some((m, n)),
                _ => None,
            })
            .collect();
        z4.sort();
        let mut expected = vec![(0, 0), (2, 2), (2, 0), (0, 2), (3, 1), (1, 3), (1, 1), (3, 3)];
        expected.sort();
        assert_eq!(z4, expected);

        let groups = enumerate_galois_groups(&hex());
        assert_eq!(groups.len(), 6);
        assert!(groups.iter().all(|g| g.kind == GroupKind::V4));
    }

    #[test]
    fn diamond_examples() {
        let sq = ComplexLattice::square();
        assert!(diamond_check(&sq, &AutomorphismGroup::v4(&sq, 1, 2)));
        let translations = AutomorphismGroup::generated_by(
            &sq,
            &[
                TorusAutomorphism::translation(LatticeFraction::halves(1, 0)),
                TorusAutomorphism::translation(LatticeFraction::halves(0, 1)),
            ],
        );
        assert_eq!(translations.order(), 4);
        assert!(!diamond_check(&sq, &translations));
        for m in 0..4 {
            for n in 0..4 {
                let g = AutomorphismGroup::z4(&sq, m, n).unwrap();
                assert_eq!(diamond_check(&sq, &g), (m - n) % 2 == 0, "({m},{n})");
            }
        }
    }

    #[test]
    fn intersections() {
        let sq = ComplexLattice::square();
        let z = |m, n| AutomorphismGroup::z4(&sq, m, n).unwrap();
        assert_eq!(group_intersection(&sq, &z(0, 0), &z(2, 2)).label, GroupLabel::Involution(0));
        assert_eq!(group_intersection(&sq, &z(3, 1), &z(1, 3)).label, GroupLabel::Involution(1));
        assert_eq!(group_intersection(&sq, &z(2, 0), &z(0, 2)).label, GroupLabel::Involution(3));
        assert_eq!(group_intersection(&sq, &z(1, 1), &z(3, 3)).label, GroupLabel::Involution(2));
        let opposite = group_intersection(&sq, &AutomorphismGroup::v4(&sq, 0, 1), &AutomorphismGroup::v4(&sq, 2, 3));
        assert_eq!(opposite.order(), 2);
        assert!(opposite.elements.iter().any(|g| g.is_translation() && !g.is_identity()));
    }

    #[test]
    fn klein_products_are_two_torsion_translations() {
        for lat in [ComplexLattice::square(), ComplexLattice::new(c64(0.3, 1.7)).unwrap(), hex()] {
            for i in 0..4 {
                for j in i + 1..4 {
                    let (a, b) = (TorusAutomorphism::involution(&lat, i), TorusAutomorphism::involution(&lat, j));
                    let t = a.compose(&lat, &b);
                    assert!(t.is_translation() && t.alpha.half_period_index().is_some() && !t.is_identity());
                    let g = AutomorphismGroup::v4(&lat, i, j);
                    assert!(g.is_closed(&lat));
                    assert_eq!(g.label, GroupLabel::V4(i, j));
                }
            }
        }
    }

    #[test]
    fn exhaustive_search_is_tight() {
        let sq = ComplexLattice::square();
        let all = order_four_subgroups(&sq);
        let passing: Vec<_> = all.iter().filter(|g| diamond_check(&sq, g)).collect();
        assert_eq!(passing.len(), 14);
        for g in &all {
            assert!(g.is_closed(&sq));
        }
        assert!(all.len() > passing.len());
    }

    #[test]
    fn wp_parity_and_half_periods() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for lat in [ComplexLattice::square(), ComplexLattice::new(c64(0.2, 1.3)).unwrap(), hex()] {
            let ev = WpEvaluator::new(&lat);
            for _ in 0..20 {
                let z = lat.point(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
                let (a, da) = ev.eval(z).unwrap();
                let (b, db) = ev.eval(-z).unwrap();
                assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
                assert!((da + db).norm() < 1e-9 * da.norm().max(1.0));
            }
            let mut sum = c64(0.0, 0.0);
            for (m, n) in [(1, 0), (0, 1), (1, 1)] {
                let (x, y) = ev.eval(LatticeFraction::halves(m, n).to_complex(&lat)).unwrap();
                sum += x;
                assert!(y.norm() < 1e-9, "{y}");
            }
            assert!(sum.norm() < 1e-9);
        }
    }

    #[test]
    fn wp_pole() {
        let sq = ComplexLattice::square();
        assert!(matches!(wp_eval(&sq, c64(1.0, 1.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn wp_against_lattice_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for lat in [
            ComplexLattice::square(),
            ComplexLattice::with_scale(c64(0.1, 0.9), c64(1.3, 0.4)).unwrap(),
            hex(),
        ] {
            let ev = WpEvaluator::new(&lat);
            for _ in 0..50 {
                let z = lat.point(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                if lat.lattice_distance(z) < 0.05 {
                    continue;
                }
                let (x, y) = ev.eval(z).unwrap();
                let (xo, yo) = wp_lattice_sum(&lat, lat.reduce(z));
                assert!((x - xo).norm() < 1e-8 * xo.norm().max(1.0), "{x} vs {xo}");
                assert!((y - yo).norm() < 1e-8 * yo.norm().max(1.0), "{y} vs {yo}");
            }
        }
    }

    #[test]
    fn torus_points() {
        let c = curve_from_roots(Scalar::new(1, 2), Scalar::new(-1, 2), Scalar::zero()).unwrap();
        let u = Uniformization::from_curve(&c).unwrap();
        assert_eq!(u.half_period_root, [0, 1, 2]);
        assert_eq!(u.lattice().symmetry_order(), 4);
        let g2 = u.evaluator.g2();
        assert!((g2 - c64(1.0, 0.0)).norm() < 1e-10, "{g2}");
        let p = u.point(0.5, 0.0);
        let expected = normalize4([1.0, 0.25, 0.5, 0.0].map(|x| c64(x, 0.0)));
        let ratio = p[0] / expected[0];
        for k in 0..4 {
            assert!((p[k] - ratio * expected[k]).norm() < 1e-9);
        }
        assert_eq!(u.point(0.0, 0.0), [0.0, 1.0, 0.0, 0.0].map(|x| c64(x, 0.0)));
    }

    #[test]
    fn uniformization_matches_roots() {
        let c = curve_from_roots(Scalar::new(1, 3), Scalar::new(-3, 2), Scalar::new(7, 6)).unwrap();
        let u = Uniformization::from_curve(&c).unwrap();
        let mut seen = u.half_period_root;
        seen.sort();
        assert_eq!(seen, [0, 1, 2]);
        assert!((u.evaluator.g2() + c64(c.p().to_f64(), 0.0)).norm() < 1e-9);
        assert!((u.evaluator.g3() + c64(c.q().to_f64(), 0.0)).norm() < 1e-9);
    }

    #[test]
    fn normalize_divisor_examples() {
        assert_eq!(normalize_divisor(&[c64(0.0, 0.0); 4]), c64(0.0, 0.0));
        let b = normalize_divisor(&[c64(0.125, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]);
        assert!((b - c64(-1.0 / 32.0, 0.0)).norm() < 1e-15);
        let sq = ComplexLattice::square();
        assert!(abel_equivalent(&sq, &[c64(0.25, 0.0); 4], 1e-8));
        assert!(abel_equivalent(&sq, &[c64(0.0, 0.0); 4], 1e-8));
        assert!(!abel_equivalent(&sq, &[c64(0.25, 0.0), c64(0.1, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)], 1e-8));
    }

    #[test]
    fn wp_satisfies_ode_and_addition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for lat in [ComplexLattice::square(), ComplexLattice::new(c64(-0.3, 1.1)).unwrap(), hex()] {
            let ev = WpEvaluator::new(&lat);
            let (g2, g3) = (ev.g2(), ev.g3());
            for _ in 0..100 {
                let z = lat.point(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
                if lat.lattice_distance(z) < 0.02 {
                    continue;
                }
                let (x, y) = ev.eval(z).unwrap();
                let rhs = 4.0 * x * x * x - g2 * x - g3;
                assert!((y * y - rhs).norm() < 1e-9 * rhs.norm().max(1.0));
            }
            for _ in 0..20 {
                let z1 = lat.point(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
                let z2 = lat.point(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
                if [z1, z2, z1 + z2, z1 - z2].iter().any(|&w| lat.lattice_distance(w) < 0.05) {
                    continue;
                }
                let (x1, y1) = ev.eval(z1).unwrap();
                let (x2, y2) = ev.eval(z2).unwrap();
                let m = (y1 - y2) / (x1 - x2);
                let printed = m * m / 4.0 - x1 - x2;
                let (direct, _) = ev.eval(z1 + z2).unwrap();
                assert!((printed - direct).norm() < 1e-8 * direct.norm().max(1.0));
            }
        }
    }

    fn det4(rows: &[[Complex64; 4]; 4]) -> Complex64 {
        let m = nalgebra::Matrix4::from_fn(|i, j| rows[i][j]);
        m.determinant()
    }

    #[test]
    fn abel_sums_are_coplanar() {
        let c = curve_from_roots(Scalar::new(1, 3), Scalar::new(-3, 2), Scalar::new(7, 6)).unwrap();
        let u = Uniformization::from_curve(&c).unwrap();
        let lat = u.lattice().clone();
        let on_quadric = |q: &crate::projective::QuadricForm, p: &[Complex64; 4]| {
            let s = q.sym();
            let mut acc = c64(0.0, 0.0);
            for i in 0..4 {
                for j in 0..4 {
                    acc += p[i] * p[j] * s[(i, j)].to_f64();
                }
            }
            acc.norm()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut alphas: Vec<Complex64> =
                (0..3).map(|_| lat.point(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))).collect();
            alphas.push(-alphas.iter().sum::<Complex64>() + lat.point(1.0, -2.0));
            assert!(abel_equivalent(&lat, &alphas, 1e-8));
            let pts: Vec<[Complex64; 4]> = alphas.iter().map(|&a| torus_point_with(&u.evaluator, a)).collect();
            for p in &pts {
                assert!(on_quadric(c.f1(), p) < 1e-8 && on_quadric(c.f2(), p) < 1e-8);
            }
            let d = det4(&[pts[0], pts[1], pts[2], pts[3]]);
            assert!(d.norm() < 1e-7, "{d}");

            let mut bad = alphas.clone();
            bad[3] += lat.point(0.37, 0.11);
            assert!(!abel_equivalent(&lat, &bad, 1e-8));
            let pb: Vec<_> = bad.iter().map(|&a| torus_point_with(&u.evaluator, a)).collect();
            assert!(det4(&[pb[0], pb[1], pb[2], pb[3]]).norm() > 1e-5);

            let beta = normalize_divisor(&bad);
            let shifted: Vec<_> = bad.iter().map(|a| a + beta).collect();
            assert!(abel_equivalent(&lat, &shifted, 1e-9));
        }
    }

    proptest! {
        #[test]
        fn composition_is_associative(a in 0usize..4, b in 0usize..4, c in 0usize..4,
                                      r in prop::array::uniform6(0i64..4)) {
            let sq = ComplexLattice::square();
            let f = TorusAutomorphism::new(&sq, a, LatticeFraction::quarters(r[0], r[1]));
            let g = TorusAutomorphism::new(&sq, b, LatticeFraction::quarters(r[2], r[3]));
            let h = TorusAutomorphism::new(&sq, c, LatticeFraction::quarters(r[4], r[5]));
            prop_assert_eq!(f.compose(&sq, &g).compose(&sq, &h), f.compose(&sq, &g.compose(&sq, &h)));
            // numeric action agrees with exact composition
            let z = c64(0.123, 0.456);
            let lhs = f.apply(&sq, g.apply(&sq, z));
            let rhs = f.compose(&sq, &g).apply(&sq, z);
            prop_assert!(sq.lattice_distance(lhs - rhs) < 1e-12);
        }
    }
}
