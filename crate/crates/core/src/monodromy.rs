//! Monodromy of a plane quartic projected from a point.
//!
//! Lines through `R` are parametrized as `⟨R, A + tB⟩`. The four
//! intersections with `Γ` are the roots of `f_t(s) = Γ(A + tB + sR)`, whose
//! leading coefficient is `Γ(R) ≠ 0`. The branch values of `t` are the roots
//! of the discriminant, computed exactly. Tracking the roots around a lasso
//! at each branch value gives generators of the monodromy group, and `R` is
//! a Galois point exactly when that group is transitive of order four.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_integer::Integer;
use num_rational::BigRational;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Error;
use crate::projective::ProjLine;
use crate::exact::{poly_resultant, Field, GaussRat, Poly, Scalar};
use crate::projection::{PlaneCurveRecord, PlaneForm};
use crate::torus::GroupKind;

pub type Perm = Vec<usize>;

/// Newton interpolation through `(xs[i], ys[i])`.
pub fn interpolate(xs: &[Scalar], ys: &[Scalar]) -> Poly {
    let n = xs.len();
    let mut dd: Vec<Scalar> = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    let mut out = Poly::constant(dd[n - 1].clone());
    for i in (0..n - 1).rev() {
        out = &(&out * &Poly::linear_root(&xs[i])) + &Poly::constant(dd[i].clone());
    }
    out
}

fn horner(coeffs: &[Complex64], t: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c)
}

/// All complex roots of a polynomial given lowest degree first, from the
/// companion matrix and polished by Newton steps.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.iter().rposition(|c| c.norm() > 0.0).unwrap_or(0);
    if n == 0 {
        return vec![];
    }
    let lead = coeffs[n];
    let comp = DMatrix::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -coeffs[i] / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let eig = comp.schur().eigenvalues().expect("complex Schur form is triangular");
    let deriv: Vec<Complex64> = (1..=n).map(|k| coeffs[k] * k as f64).collect();
    eig.iter()
        .map(|&z0| {
            let mut z = z0;
            for _ in 0..3 {
                let d = horner(&deriv, z);
                if d.norm() == 0.0 {
                    break;
                }
                let step = horner(&coeffs[..=n], z) / d;
                if !step.is_finite() {
                    break;
                }
                z -= step;
            }
            z
        })
        .collect()
}

fn permutations(n: usize) -> Vec<Perm> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Reorder `next` to follow `cur`; returns the reordered roots and the
/// largest displacement.
fn best_match(cur: &[Complex64], next: &[Complex64], perms: &[Perm]) -> (Vec<Complex64>, f64) {
    let mut best = (f64::INFINITY, 0);
    for (k, p) in perms.iter().enumerate() {
        let d = (0..cur.len()).map(|i| (cur[i] - next[p[i]]).norm()).fold(0.0, f64::max);
        if d < best.0 {
            best = (d, k);
        }
    }
    (perms[best.1].iter().map(|&j| next[j]).collect(), best.0)
}

fn min_separation(z: &[Complex64]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            m = m.min((z[i] - z[j]).norm());
        }
    }
    m
}

/// A finite permutation group on `n` points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermGroup {
    pub degree: usize,
    pub elements: BTreeSet<Perm>,
}

impl PermGroup {
    pub fn generated_by(degree: usize, gens: &[Perm]) -> Self {
        let id: Perm = (0..degree).collect();
        let mut elements = BTreeSet::from([id.clone()]);
        let mut frontier = vec![id];
        while let Some(g) = frontier.pop() {
            for h in gens {
                let gh: Perm = h.iter().map(|&i| g[i]).collect();
                if elements.insert(gh.clone()) {
                    frontier.push(gh);
                }
            }
        }
        PermGroup { degree, elements }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_transitive(&self) -> bool {
        let orbit: BTreeSet<usize> = self.elements.iter().map(|g| g[0]).collect();
        orbit.len() == self.degree
    }

    /// A cover of degree `n` is Galois iff its monodromy group is
    /// transitive of order `n`.
    pub fn is_regular(&self) -> bool {
        self.is_transitive() && self.order() == self.degree
    }

    fn element_order(g: &Perm) -> usize {
        let mut cur = g.clone();
        let mut k = 1;
        while cur.iter().enumerate().any(|(i, &v)| i != v) {
            cur = g.iter().map(|&i| cur[i]).collect();
            k += 1;
        }
        k
    }

    pub fn kind(&self) -> Option<GroupKind> {
        if self.degree != 4 || !self.is_regular() {
            return None;
        }
        Some(if self.elements.iter().any(|g| Self::element_order(g) == 4) {
            GroupKind::Z4
        } else {
            GroupKind::V4
        })
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MonodromyReport {
    pub point: [Scalar; 3],
    pub galois: bool,
    pub transitive: bool,
    pub group_order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<GroupKind>,
    pub branch_points: usize,
    /// One permutation per branch point, in the order of the branch values'
    /// arguments seen from the base point.
    pub generators: Vec<Perm>,
}

struct Fibration {
    /// `c[k](t)`: coefficient of `sᵏ` in `f_t(s)`, numerically.
    coeffs: Vec<Vec<Complex64>>,
    branch: Vec<Complex64>,
}

impl Fibration {
    fn fibre(&self, t: Complex64) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| horner(c, t)).collect()
    }

    fn roots(&self, t: Complex64) -> Vec<Complex64> {
        poly_roots(&self.fibre(t))
    }

    fn track(&self, path: &dyn Fn(f64) -> Complex64, start: Vec<Complex64>, perms: &[Perm]) -> Result<Vec<Complex64>, Error> {
        let (mut u, mut h) = (0.0f64, 0.02f64);
        let mut cur = start;
        while u < 1.0 {
            let step = h.min(1.0 - u);
            let next = self.roots(path(u + step));
            if next.len() != cur.len() {
                return Err(Error::Construction("fibre degree dropped along a path".into()));
            }
            let (ordered, moved) = best_match(&cur, &next, perms);
            if moved < 0.25 * min_separation(&cur) {
                cur = ordered;
                u += step;
                h = (h * 1.5).min(0.05);
            } else {
                h /= 2.0;
                if h < 1e-10 {
                    return Err(Error::Construction("root tracking stalled near a branch value".into()));
                }
            }
        }
        Ok(cur)
    }
}

fn gauss_of(z: Complex64) -> GaussRat {
    let q = |x: f64| Scalar::from_ratio(BigRational::from_float(x).expect("finite"));
    GaussRat::new(q(z.re), q(z.im))
}

/// Newton steps with the polynomial evaluated exactly at the current
/// (floating point) iterate, so clustered roots are resolved to full
/// double precision.
fn polish_exact(p: &Poly, z0: Complex64) -> Complex64 {
    let dp = p.derivative();
    let eval = |q: &Poly, z: &GaussRat| -> GaussRat {
        q.coeffs().iter().rev().fold(GaussRat::zero(), |acc, c| acc * z.clone() + GaussRat::real(c.clone()))
    };
    let mut z = z0;
    for _ in 0..8 {
        let g = gauss_of(z);
        let d = eval(&dp, &g);
        if d.is_zero() {
            break;
        }
        let step = (eval(p, &g) / d).to_complex();
        z -= step;
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

fn fibration(form: &PlaneForm, r: &[Scalar; 3], rng: &mut ChaCha8Rng) -> Result<Fibration, Error> {
    let (a, b) = loop {
        let a: [Scalar; 3] = std::array::from_fn(|_| Scalar::from_int(rng.gen_range(-9..=9)));
        let b: [Scalar; 3] = std::array::from_fn(|_| Scalar::from_int(rng.gen_range(-9..=9)));
        let det = &a[0] * &(&b[1] * &r[2] - &b[2] * &r[1]) - &a[1] * &(&b[0] * &r[2] - &b[2] * &r[0])
            + &a[2] * &(&b[0] * &r[1] - &b[1] * &r[0]);
        if !det.is_zero() {
            break (a, b);
        }
    };
    let small: Vec<Scalar> = (0..5).map(Scalar::from_int).collect();
    // exact fibre polynomial in s over a rational base point
    let fibre_at = |t: &Scalar| -> Poly {
        let vals: Vec<Scalar> = small
            .iter()
            .map(|s| form.eval(&std::array::from_fn(|i| &a[i] + &(t * &b[i]) + &(s * &r[i]))))
            .collect();
        interpolate(&small, &vals)
    };
    let samples: Vec<Poly> = small.iter().map(&fibre_at).collect();
    let coeff_polys: Vec<Poly> = (0..5)
        .map(|k| interpolate(&small, &samples.iter().map(|f| f.coeff(k)).collect::<Vec<_>>()))
        .collect();

    let ts: Vec<Scalar> = (0..17).map(Scalar::from_int).collect();
    let discs: Vec<Scalar> = ts
        .iter()
        .map(|t| {
            let f = fibre_at(t);
            poly_resultant(&f, &f.derivative())
        })
        .collect::<Result<_, _>>()?;
    let disc = interpolate(&ts, &discs);
    if disc.is_zero() {
        return Err(Error::DegeneratePencil("every line through the point is tangent: the quartic is not reduced".into()));
    }
    let g = disc.gcd(&disc.derivative());
    let squarefree = disc.div_exact(&g)?;
    let to_c = |p: &Poly| -> Vec<Complex64> { p.coeffs().iter().map(|c| Complex64::new(c.to_f64(), 0.0)).collect() };
    let rough = poly_roots(&to_c(&squarefree));
    let branch: Vec<Complex64> = rough.iter().map(|&z| polish_exact(&squarefree, z)).collect();
    // polishing must not merge roots or wander off to a neighbour
    let sep = min_separation(&branch);
    if rough.iter().zip(&branch).any(|(a, b)| (a - b).norm() > 0.25 * sep) {
        return Err(Error::Construction("branch values are too clustered in this chart".into()));
    }
    Ok(Fibration {
        coeffs: coeff_polys.iter().map(to_c).collect(),
        branch,
    })
}

/// Monodromy group of the projection of `Γ = {form = 0}` from `r`.
pub fn monodromy(form: &PlaneForm, r: &[Scalar; 3], seed: u64) -> Result<MonodromyReport, Error> {
    if r.iter().all(Scalar::is_zero) {
        return Err(Error::InvalidInput("the zero vector is not a point".into()));
    }
    if form.eval(r).is_zero() {
        return Err(Error::InvalidInput(format!(
            "({} : {} : {}) lies on the quartic",
            r[0], r[1], r[2]
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..CHART_ATTEMPTS {
        match monodromy_in_chart(form, r, &mut rng) {
            Err(Error::Construction(msg)) => last = Some(msg),
            other => return other,
        }
    }
    Err(Error::Construction(format!(
        "no well-conditioned pencil chart in {CHART_ATTEMPTS} attempts: {}",
        last.unwrap_or_default()
    )))
}

const CHART_ATTEMPTS: usize = 12;

fn monodromy_in_chart(form: &PlaneForm, r: &[Scalar; 3], rng: &mut ChaCha8Rng) -> Result<MonodromyReport, Error> {
    let fib = fibration(form, r, rng)?;
    let deg = fib.coeffs.len() - 1;
    let perms = permutations(deg);
    let branch = &fib.branch;
    let m = branch.len();

    let radius: Vec<f64> = (0..m)
        .map(|j| {
            let near = (0..m).filter(|&k| k != j).map(|k| (branch[j] - branch[k]).norm()).fold(f64::INFINITY, f64::min);
            if near.is_finite() { 0.4 * near } else { 0.5 }
        })
        .collect();
    let center = branch.iter().sum::<Complex64>() / (m.max(1) as f64);
    let spread = branch.iter().map(|b| (b - center).norm()).fold(0.0, f64::max);

    // base point outside the branch disk whose lasso tails avoid the other disks
    let tail_end = |t0: Complex64, j: usize| branch[j] + (t0 - branch[j]) / (t0 - branch[j]).norm() * radius[j];
    let margin = |t0: Complex64| -> f64 {
        let mut worst = f64::INFINITY;
        for j in 0..m {
            let (p, q) = (t0, tail_end(t0, j));
            for k in (0..m).filter(|&k| k != j) {
                let d = segment_distance(branch[k], p, q);
                worst = worst.min(d / radius[k]);
            }
        }
        worst
    };
    let mut t0 = center + Complex64::from_polar(1.3 * spread + 1.0, 0.3);
    let mut best = margin(t0);
    for _ in 0..64 {
        if best > 1.5 {
            break;
        }
        let cand = center + Complex64::from_polar((1.3 + rng.gen_range(0.0..1.0)) * spread + 1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let mm = margin(cand);
        if mm > best {
            best = mm;
            t0 = cand;
        }
    }

    let mut start = fib.roots(t0);
    start.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| (branch[i] - t0).arg().partial_cmp(&(branch[j] - t0).arg()).unwrap());

    let mut generators = Vec::with_capacity(m);
    for &j in &order {
        let e = tail_end(t0, j);
        let b = branch[j];
        let theta0 = (e - b).arg();
        let rj = radius[j];
        let out = fib.track(&|u| t0 + (e - t0) * u, start.clone(), &perms)?;
        let around = fib.track(&|u| b + Complex64::from_polar(rj, theta0 + std::f64::consts::TAU * u), out, &perms)?;
        let back = fib.track(&|u| e + (t0 - e) * u, around, &perms)?;
        let sep = min_separation(&start);
        let perm: Perm = back
            .iter()
            .map(|z| {
                let (k, d) = start
                    .iter()
                    .enumerate()
                    .map(|(k, s)| (k, (s - z).norm()))
                    .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                    .unwrap();
                if d < 0.25 * sep { Ok(k) } else { Err(Error::Construction("loop did not close on the fibre".into())) }
            })
            .collect::<Result<_, _>>()?;
        generators.push(perm);
    }
    let group = PermGroup::generated_by(deg, &generators);
    Ok(MonodromyReport {
        point: r.clone(),
        galois: group.is_regular(),
        transitive: group.is_transitive(),
        group_order: group.order(),
        kind: group.kind(),
        branch_points: m,
        generators,
    })
}

fn segment_distance(z: Complex64, p: Complex64, q: Complex64) -> f64 {
    let d = q - p;
    let t = (((z - p) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (z - (p + d * t)).norm()
}

/// Whether `r` is an outer Galois point of the projected quartic.
pub fn verify_plane_galois_point(record: &PlaneCurveRecord, r: &[Scalar; 3], seed: u64) -> Result<MonodromyReport, Error> {
    if record.is_double_cover() {
        return Err(Error::InvalidInput("the image is a conic counted twice, not a reduced quartic".into()));
    }
    monodromy(&record.form, r, seed)
}

/// Irreducibility test: the monodromy from a point off the curve is
/// transitive exactly when the quartic is irreducible.
pub fn is_irreducible(form: &PlaneForm, seed: u64) -> Result<bool, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1d);
    let r = loop {
        let r: [Scalar; 3] = std::array::from_fn(|_| Scalar::from_int(rng.gen_range(-7..=7)));
        if !form.eval(&r).is_zero() {
            break r;
        }
    };
    Ok(monodromy(form, &r, seed)?.transitive)
}

/// The point a line through the center collapses to.
pub fn line_image(record: &PlaneCurveRecord, line: &ProjLine) -> Result<[Scalar; 3], Error> {
    if !line.contains(&record.center) {
        return Err(Error::InvalidInput(format!("{line} does not pass through the center {}", record.center)));
    }
    line.points()
        .iter()
        .map(|p| record.project(p.coords()))
        .find(|u| !u.iter().all(Scalar::is_zero))
        .ok_or_else(|| Error::DegenerateSpan(format!("{line} projects to nothing")))
}

/// `n` distinct primitive integer points of the plane, off the quartic.
pub fn sample_candidates(form: &PlaneForm, n: usize, seed: u64) -> Vec<[Scalar; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut v: [i64; 3] = std::array::from_fn(|_| rng.gen_range(-9..=9));
        let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
        if g == 0 {
            continue;
        }
        let sign = if v.iter().find(|&&x| x != 0).copied().unwrap_or(1) < 0 { -g } else { g };
        v = v.map(|x| x / sign);
        let r = v.map(Scalar::from_int);
        if seen.insert(v) && !form.eval(&r).is_zero() {
            out.push(r);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::curve_from_roots;
    use crate::projection::project_curve;
    use crate::projective::ProjPoint;
    use proptest::prelude::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn q(c: [i64; 3]) -> [Scalar; 3] {
        c.map(s)
    }

    fn vars() -> [&'static str; 3] {
        ["X", "Y", "W"]
    }

    #[test]
    fn interpolation_recovers_polynomials() {
        let p = Poly::from_ints(&[3, -1, 0, 2, 5]);
        let xs: Vec<Scalar> = (0..7).map(|k| Scalar::new(k, 3)).collect();
        let ys: Vec<Scalar> = xs.iter().map(|x| p.eval(x)).collect();
        assert_eq!(interpolate(&xs, &ys), p);
    }

    #[test]
    fn roots_of_known_polynomials() {
        // (t - 1)(t + 2)(t - i)
        let i = Complex64::new(0.0, 1.0);
        let c = [2.0 * i, Complex64::new(-2.0, 0.0) - i, Complex64::new(1.0, 0.0) - i, Complex64::new(1.0, 0.0)];
        let mut r = poly_roots(&c);
        r.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        let want = [Complex64::new(-2.0, 0.0), i, Complex64::new(1.0, 0.0)];
        for (a, b) in r.iter().zip(want) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn group_closure() {
        let id = PermGroup::generated_by(4, &[vec![0, 1, 2, 3]]);
        assert_eq!(id.order(), 1);
        assert!(!id.is_regular());
        let z4 = PermGroup::generated_by(4, &[vec![1, 2, 3, 0]]);
        assert_eq!((z4.order(), z4.kind()), (4, Some(GroupKind::Z4)));
        let v4 = PermGroup::generated_by(4, &[vec![1, 0, 3, 2], vec![2, 3, 0, 1]]);
        assert_eq!((v4.order(), v4.kind()), (4, Some(GroupKind::V4)));
        let s4 = PermGroup::generated_by(4, &[vec![1, 0, 2, 3], vec![1, 2, 3, 0]]);
        assert_eq!((s4.order(), s4.kind()), (24, None));
        let d4 = PermGroup::generated_by(4, &[vec![1, 2, 3, 0], vec![0, 3, 2, 1]]);
        assert_eq!(d4.order(), 8);
    }

    #[test]
    fn fermat_type_quartics() {
        // W^4 = X^4 - Y^4... use W^4 = XY(X - Y)(X + Y): cyclic from (0:0:1)
        let f = PlaneForm::from_terms(vars(), [([0, 0, 4], s(1)), ([3, 1, 0], s(-1)), ([1, 3, 0], s(1))]);
        let rep = monodromy(&f, &q([0, 0, 1]), 1).unwrap();
        assert!(rep.galois);
        assert_eq!(rep.kind, Some(GroupKind::Z4));
        let rep = monodromy(&f, &q([1, 2, 3]), 1).unwrap();
        assert!(!rep.galois && rep.transitive);
        // a product of two conics is reducible
        let c1 = PlaneForm::from_terms(vars(), [([2, 0, 0], s(1)), ([0, 2, 0], s(1)), ([0, 0, 2], s(-1))]);
        let c2 = PlaneForm::from_terms(vars(), [([1, 1, 0], s(1)), ([0, 0, 2], s(-2))]);
        assert!(!is_irreducible(&c1.mul(&c2), 3).unwrap());
        assert!(is_irreducible(&f, 3).unwrap());
        assert!(matches!(monodromy(&f, &q([1, 0, 0]), 1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn two_galois_points_on_one_quartic() {
        // projecting y^2 = 4x^3 - x from (0:0:1:0), where a cyclic line and a
        // Klein line cross away from the vertices
        let c = curve_from_roots(Scalar::new(1, 2), Scalar::new(-1, 2), s(0)).unwrap();
        let rec = project_curve(&c, &ProjPoint::from_ints([0, 0, 1, 0]).unwrap()).unwrap();
        let a = verify_plane_galois_point(&rec, &q([0, 0, 1]), 4).unwrap();
        assert!(a.galois);
        assert_eq!(a.kind, Some(GroupKind::Z4));
        let b = verify_plane_galois_point(&rec, &q([4, -1, 0]), 4).unwrap();
        assert!(b.galois);
        assert_eq!(b.kind, Some(GroupKind::V4));
        assert!(is_irreducible(&rec.form, 4).unwrap());
    }

    #[test]
    fn conic_images_are_rejected() {
        let c = curve_from_roots(Scalar::new(1, 2), Scalar::new(-1, 2), s(0)).unwrap();
        let rec = project_curve(&c, &ProjPoint::from_ints([4, 1, 0, 0]).unwrap()).unwrap();
        assert!(verify_plane_galois_point(&rec, &q([1, 1, 1]), 0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(6))]
        #[test]
        fn monodromy_is_independent_of_the_pencil_chart(seed in 0u64..1000) {
            let f = PlaneForm::from_terms(vars(), [([0, 0, 4], s(1)), ([3, 1, 0], s(-1)), ([1, 3, 0], s(1)), ([2, 1, 1], s(2))]);
            let a = monodromy(&f, &q([1, 2, 5]), seed).unwrap();
            let b = monodromy(&f, &q([1, 2, 5]), seed + 7).unwrap();
            prop_assert_eq!(a.group_order, 24);
            prop_assert_eq!(b.group_order, 24);
        }
    }
}
