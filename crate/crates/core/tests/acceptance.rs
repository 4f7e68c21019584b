//! Acceptance criteria, one line of output each.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the table.
//! A criterion listed in `KNOWN_GAPS` is evaluated literally and may print
//! FAIL; the test then still requires every other clause of it to hold.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use elliptic_galois::curve::{curve_from_roots, tetrahedron, EllipticCurveModel};
use elliptic_galois::exact::{Matrix, Poly, Scalar};
use elliptic_galois::function_field::{fixed_generator, is_invariant, line_plane_equations, printed_k0_variant};
use elliptic_galois::galois::{GaloisCatalog, LineLabel, ProjTransform, DEFAULT_TOL};
use elliptic_galois::monodromy::{is_irreducible, line_image, sample_candidates, verify_plane_galois_point};
use elliptic_galois::numeric::{smallest_singular, CVec4};
use elliptic_galois::projection::{classify_center, project_curve, CenterClass};
use elliptic_galois::projective::{ProjPoint, QuadricForm};
use elliptic_galois::torus::{
    abel_equivalent, candidate_elements, diamond_check, enumerate_galois_groups, group_intersection,
    normalize_divisor, torus_point, AutomorphismGroup, ComplexLattice, GroupKind, GroupLabel, TorusAutomorphism,
    WpEvaluator,
};

/// Criteria whose literal wording does not hold for the mathematics.
const KNOWN_GAPS: [usize; 2] = [2, 8];

struct Verdict {
    passed: bool,
    /// Every clause except the one recorded as a known gap.
    rest_passed: bool,
    detail: String,
    /// Time of the computation under test when the oracle is expensive.
    elapsed: Option<Duration>,
}

impl Verdict {
    fn plain(passed: bool, detail: String) -> Self {
        Verdict {
            passed,
            rest_passed: passed,
            detail,
            elapsed: None,
        }
    }
}

fn q(n: i64, d: i64) -> Scalar {
    Scalar::new(n, d)
}

fn lemniscatic() -> EllipticCurveModel {
    curve_from_roots(q(1, 2), q(-1, 2), q(0, 1)).unwrap()
}

fn random_curves(n: usize, seed: u64) -> Vec<EllipticCurveModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let e1 = q(rng.gen_range(-30..30), rng.gen_range(1..12));
        let e2 = q(rng.gen_range(-30..30), rng.gen_range(1..12));
        let e3 = -(&e1 + &e2);
        if let Ok(c) = curve_from_roots(e1, e2, e3) {
            if !c.is_lemniscatic() {
                out.push(c);
            }
        }
    }
    out
}

/// Resultant of `F₁, F₂` restricted to the line `⟨a, b⟩`, computed from the
/// binary quadratics `F(sa + tb)` directly.
fn restricted_resultant(curve: &EllipticCurveModel, a: &[Scalar], b: &[Scalar]) -> Scalar {
    let coeffs = |f: &QuadricForm| {
        let sum: Vec<Scalar> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        let (fa, fb) = (f.eval_vec(a), f.eval_vec(b));
        let mid = f.eval_vec(&sum) - &fa - &fb;
        (fa, mid, fb)
    };
    let (a1, b1, c1) = coeffs(curve.f1());
    let (a2, b2, c2) = coeffs(curve.f2());
    let ac = &a1 * &c2 - &a2 * &c1;
    &ac * &ac - (&a1 * &b2 - &a2 * &b1) * (&b1 * &c2 - &b2 * &c1)
}

fn proportional_exact(u: &[Scalar], v: &[Scalar]) -> bool {
    (0..u.len()).all(|i| (0..u.len()).all(|j| &u[i] * &v[j] == &u[j] * &v[i]))
}

fn exact_matrix(t: &ProjTransform) -> Option<&Matrix<Scalar>> {
    match t {
        ProjTransform::Exact(m) => Some(m),
        _ => None,
    }
}

fn c1() -> Verdict {
    let c = lemniscatic();
    let tet = tetrahedron(&c);
    let want = [[0, 0, 0, 1], [4, -1, 2, 0], [4, -1, -2, 0], [4, 1, 0, 0]].map(|v| ProjPoint::from_ints(v).unwrap());
    let vertices = tet.vertices == want;
    let cubic = c.pencil_cubic() == &(&Poly::x() * &Poly::from_ints(&[-2, 1])) * &Poly::from_ints(&[2, 1]);
    let rows: Vec<Vec<Scalar>> = want.iter().map(|p| p.to_vec()).collect();
    let det = Matrix::from_rows(rows).det();
    let ok = vertices && cubic && !det.is_zero() && !tet.determinant.is_zero();
    Verdict::plain(
        ok,
        format!("vertices {vertices}, pencil cubic b(b-2)(b+2) {cubic}, vertex determinant {det}"),
    )
}

fn c2() -> Verdict {
    let mut disjoint = true;
    let mut klein = true;
    let mut pencil = true;
    let mut pointwise = true;
    let mut lines = 0;
    for curve in random_curves(5, 2) {
        let cat = GaloisCatalog::build(&curve, DEFAULT_TOL, 3).unwrap();
        for rec in cat.records.iter().filter(|r| r.kind == GroupKind::V4) {
            lines += 1;
            let line = rec.line.exact.as_ref().expect("edges are rational");
            let [a, b] = line.points();
            disjoint &= !restricted_resultant(&curve, a.coords(), b.coords()).is_zero();
            let mats: Vec<&Matrix<Scalar>> = rec.realization.iter().filter_map(|r| exact_matrix(&r.matrix)).collect();
            klein &= mats.len() == 4;
            // V4: every element squares to a scalar and the product of the
            // two non-trivial generators is the third element
            let nontrivial: Vec<&Matrix<Scalar>> = mats.iter().copied().filter(|m| !m.is_scalar()).collect();
            klein &= nontrivial.len() == 3;
            klein &= nontrivial.iter().all(|m| (*m * *m).is_scalar());
            if nontrivial.len() == 3 {
                klein &= (nontrivial[0] * nontrivial[1]).proportionality(nontrivial[2]).is_some();
            }
            for m in &mats {
                let basis = [curve.f1().clone(), curve.f2().clone()];
                pencil &= curve.f1().pullback(m).in_span(&basis) && curve.f2().pullback(m).in_span(&basis);
                // pointwise: M restricted to the line is a scalar
                let sum: Vec<Scalar> = a.coords().iter().zip(b.coords()).map(|(x, y)| x + y).collect();
                pointwise &= [a.to_vec(), b.to_vec(), sum].iter().all(|v| proportional_exact(&m.apply(v), v));
            }
        }
    }
    let rest = disjoint && klein && pencil && lines == 30;
    Verdict {
        passed: rest && pointwise,
        rest_passed: rest,
        detail: format!(
            "{lines} edge lines on 5 curves: disjoint {disjoint}, V4 matrix groups {klein}, pencil preserved {pencil}, \
             fix line pointwise {pointwise} (reflections fix only two points of the line; every plane through it is fixed instead)"
        ),
        elapsed: None,
    }
}

fn c3() -> Verdict {
    let mut ok = true;
    let mut numeric_gap: f64 = 0.0;
    let mut curves = random_curves(2, 9);
    curves.push(lemniscatic());
    for curve in &curves {
        let uni = elliptic_galois::torus::Uniformization::from_curve(curve).unwrap();
        for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            let g = fixed_generator(curve, i, j).unwrap();
            ok &= g.invariant && g.matches_plane_ratio && g.covering_degree == 4;
            // numeric oracle: the generator equals the plane ratio at torus points
            let planes = line_plane_equations(curve, i, j).unwrap();
            for k in 0..8 {
                let p = uni.point(0.13 + 0.097 * k as f64, 0.29 + 0.061 * k as f64);
                let h = |c: &[Scalar; 4]| -> Complex64 { (0..4).map(|t| p[t] * c[t].to_f64()).sum() };
                let ratio = if i == 0 { h(&planes[0]) / h(&planes[1]) } else { h(&planes[1]) / h(&planes[0]) };
                let (x, y) = (p[2] / p[0], p[3] / p[0]);
                let f = g.generator.eval_complex(x, y);
                numeric_gap = numeric_gap.max((f - ratio).norm() / (1.0 + ratio.norm()));
            }
        }
    }
    let lem = lemniscatic();
    let mut flagged = 0;
    for i in 1..=3 {
        let printed = printed_k0_variant(&lem, i).unwrap();
        if !is_invariant(&lem, &printed, &[0, i]).unwrap() {
            flagged += 1;
        }
    }
    let passed = ok && numeric_gap < 1e-8 && flagged == 3;
    Verdict::plain(
        passed,
        format!(
            "18 generators invariant, degree 4, equal to the plane ratio: {ok} (numeric gap {numeric_gap:.1e}); \
             printed (x - c_i) denominator non-invariant for {flagged}/3 on j = 1728"
        ),
    )
}

/// Every 4-element subset containing the identity, closed under
/// composition and passing the orbit test: a brute-force oracle.
fn brute_force_groups(lat: &ComplexLattice) -> Vec<AutomorphismGroup> {
    let elems: Vec<TorusAutomorphism> = candidate_elements(lat).into_iter().filter(|g| !g.is_identity()).collect();
    let id = TorusAutomorphism::identity();
    let mut out = Vec::new();
    let n = elems.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let set: BTreeSet<TorusAutomorphism> =
                    [id.clone(), elems[a].clone(), elems[b].clone(), elems[c].clone()].into_iter().collect();
                let closed = set.iter().all(|x| set.iter().all(|y| set.contains(&x.compose(lat, y))));
                if closed {
                    let g = AutomorphismGroup::from_elements(lat, set);
                    if diamond_check(lat, &g) {
                        out.push(g);
                    }
                }
            }
        }
    }
    out
}

fn c4() -> Verdict {
    let start = Instant::now();
    let rect = ComplexLattice::new(Complex64::new(0.0, 2.0)).unwrap();
    let square = ComplexLattice::square();
    let g_rect = enumerate_galois_groups(&rect);
    let g_sq = enumerate_galois_groups(&square);
    let elapsed = start.elapsed();
    let z4: BTreeSet<(i64, i64)> = g_sq
        .iter()
        .filter_map(|g| match g.label {
            GroupLabel::Z4(m, n) => Some((m, n)),
            _ => None,
        })
        .collect();
    let expected: BTreeSet<(i64, i64)> = [(0, 0), (2, 2), (2, 0), (0, 2), (1, 1), (3, 3), (3, 1), (1, 3)].into_iter().collect();
    let key = |gs: &[AutomorphismGroup]| -> BTreeSet<Vec<TorusAutomorphism>> { gs.iter().map(|g| g.elements.clone()).collect() };
    let oracle_rect = brute_force_groups(&rect);
    let oracle_sq = brute_force_groups(&square);
    let agree = key(&g_rect) == key(&oracle_rect) && key(&g_sq) == key(&oracle_sq);
    let v4_sq = g_sq.iter().filter(|g| g.kind == GroupKind::V4).count();
    let passed = g_rect.len() == 6 && g_sq.len() == 14 && v4_sq == 6 && z4 == expected && agree;
    let mut v = Verdict::plain(
        passed,
        format!(
            "omega = 2i: {} groups; omega = i: {} groups ({v4_sq} V4 + {} Z4), Z4 labels match: {}; brute-force oracle agrees: {agree}",
            g_rect.len(),
            g_sq.len(),
            z4.len(),
            z4 == expected
        ),
    );
    v.elapsed = Some(elapsed);
    v
}

/// `σ_min/σ_max` of the four cutting planes, and the meeting point.
fn meet(a: &[CVec4; 2], b: &[CVec4; 2]) -> (f64, Vec<Complex64>) {
    let rows: Vec<Vec<Complex64>> = a.iter().chain(b).map(|h| h.to_vec()).collect();
    let (v, ratio, _) = smallest_singular(&rows, 4);
    (ratio, v)
}

fn point_gap(p: &[Complex64], v: &ProjPoint) -> f64 {
    let w: Vec<Complex64> = v.to_f64().iter().map(|x| Complex64::new(*x, 0.0)).collect();
    elliptic_galois::numeric::proportional(p, &w).1
}

fn c5() -> Verdict {
    let cat = GaloisCatalog::build(&lemniscatic(), DEFAULT_TOL, 5).unwrap();
    let planes = |l: LineLabel| cat.record(l).unwrap().line.planes;
    let pairs = [((0, 0), (2, 2), 0), ((2, 0), (0, 2), 3), ((1, 1), (3, 3), 2), ((3, 1), (1, 3), 1)];
    let mut worst: f64 = 0.0;
    for &(a, b, v) in &pairs {
        let (ratio, p) = meet(&planes(LineLabel::Z4(a.0, a.1)), &planes(LineLabel::Z4(b.0, b.1)));
        worst = worst.max(ratio).max(point_gap(&p, &cat.tetrahedron.vertices[v]));
    }
    let mut degrees = Vec::new();
    for v in &cat.tetrahedron.vertices {
        let pt: Vec<Complex64> = v.to_f64().iter().map(|x| Complex64::new(*x, 0.0)).collect();
        let through = |k: GroupKind| cat.records.iter().filter(|r| r.kind == k && r.line.distance(&pt) < 1e-8).count();
        degrees.push((through(GroupKind::V4), through(GroupKind::Z4)));
    }
    let z4: Vec<LineLabel> = cat.records.iter().filter(|r| r.kind == GroupKind::Z4).map(|r| r.label).collect();
    let paired = |a: LineLabel, b: LineLabel| {
        pairs.iter().any(|&(x, y, _)| {
            let (x, y) = (LineLabel::Z4(x.0, x.1), LineLabel::Z4(y.0, y.1));
            (a, b) == (x, y) || (a, b) == (y, x)
        })
    };
    let mut skew_margin = f64::INFINITY;
    for (k, &a) in z4.iter().enumerate() {
        for &b in &z4[k + 1..] {
            if !paired(a, b) {
                skew_margin = skew_margin.min(meet(&planes(a), &planes(b)).0);
            }
        }
    }
    let passed = worst < 1e-8 && degrees.iter().all(|&d| d == (3, 2)) && skew_margin > 1e-4 && cat.records.len() == 14;
    Verdict::plain(
        passed,
        format!(
            "paired meets at vertices within {worst:.1e}; per-vertex (V4, Z4) = {degrees:?}; unpaired cyclic lines skew (margin {skew_margin:.2}); {} lines",
            cat.records.len()
        ),
    )
}

fn c6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let lattices = [ComplexLattice::square(), ComplexLattice::new(Complex64::new(0.31, 1.27)).unwrap()];
    let (mut ode, mut add): (f64, f64) = (0.0, 0.0);
    for lat in &lattices {
        let ev = WpEvaluator::new(lat);
        let (g2, g3) = (ev.g2(), ev.g3());
        for _ in 0..50 {
            let z = lat.point(rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95));
            let (x, y) = ev.eval(z).unwrap();
            let rhs = 4.0 * x * x * x - g2 * x - g3;
            ode = ode.max((y * y - rhs).norm() / (y.norm_sqr() + rhs.norm() + 1.0));
            let w = lat.point(rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95));
            let (xw, yw) = ev.eval(w).unwrap();
            if (x - xw).norm() > 1e-3 && lat.lattice_distance(z + w) > 1e-2 {
                let m = (y - yw) / (x - xw);
                let want = m * m / 4.0 - x - xw;
                let (got, _) = ev.eval(z + w).unwrap();
                add = add.max((got - want).norm() / (1.0 + got.norm()));
            }
        }
    }
    // Abel's condition against coplanarity of the embedded points
    let lat = &lattices[1];
    let mut agree = 0;
    let mut postcondition = true;
    for k in 0..100 {
        let mut alphas: Vec<Complex64> = (0..3).map(|_| lat.point(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))).collect();
        let fourth = if k % 2 == 0 {
            -alphas.iter().sum::<Complex64>() + lat.point(rng.gen_range(-2..3) as f64, rng.gen_range(-2..3) as f64)
        } else {
            lat.point(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))
        };
        alphas.push(fourth);
        let rows: Vec<Vec<Complex64>> = alphas.iter().map(|&a| torus_point(lat, a).to_vec()).collect();
        let (_, ratio, _) = smallest_singular(&rows, 4);
        let coplanar = ratio < 1e-8;
        let equivalent = abel_equivalent(lat, &alphas, 1e-8);
        if coplanar == equivalent && equivalent == (k % 2 == 0) {
            agree += 1;
        }
        let beta = normalize_divisor(&alphas);
        postcondition &= alphas.iter().map(|a| a + beta).sum::<Complex64>().norm() < 1e-12;
    }
    let passed = ode < 1e-9 && add < 1e-8 && agree == 100 && postcondition;
    Verdict::plain(
        passed,
        format!(
            "ODE residual {ode:.1e} (100 samples), addition residual {add:.1e}, Abel <=> coplanar on {agree}/100, normalization postcondition {postcondition}"
        ),
    )
}

fn c7() -> Verdict {
    let curve = lemniscatic();
    let cat = GaloisCatalog::build(&curve, DEFAULT_TOL, 7).unwrap();
    let seed = 17;
    let vertices_conic = cat
        .tetrahedron
        .vertices
        .iter()
        .all(|v| project_curve(&curve, v).map(|r| r.is_double_cover()).unwrap_or(false));

    let center = ProjPoint::from_ints([4, 1, 0, 1]).unwrap();
    let on_edge = classify_center(&cat, &center).unwrap() == CenterClass::OnGaloisLine { lines: vec![LineLabel::Edge(0, 3)] };
    let rec = project_curve(&curve, &center).unwrap();
    let irreducible = !rec.is_double_cover() && is_irreducible(&rec.form, seed).unwrap();
    let edge = cat.record(LineLabel::Edge(0, 3)).unwrap().line.exact.clone().unwrap();
    let r = line_image(&rec, &edge).unwrap();
    let at_image = verify_plane_galois_point(&rec, &r, seed).unwrap();
    let galois = at_image.galois && at_image.kind == Some(GroupKind::V4);
    // the other vertices do not give Galois points
    let others = [1, 2].iter().all(|&v| {
        let p = rec.project(cat.tetrahedron.vertices[v].coords());
        !verify_plane_galois_point(&rec, &p, seed).unwrap().galois
    });

    let generic = ProjPoint::from_ints([1, 2, 3, 5]).unwrap();
    let is_generic = classify_center(&cat, &generic).unwrap() == CenterClass::Generic;
    let grec = project_curve(&curve, &generic).unwrap();
    let candidates = sample_candidates(&grec.form, 25, seed);
    let failing = candidates
        .iter()
        .filter(|r| !verify_plane_galois_point(&grec, r, seed).unwrap().galois)
        .count();
    let passed = vertices_conic && on_edge && irreducible && galois && others && is_generic && !grec.is_double_cover() && failing == 25;
    Verdict::plain(
        passed,
        format!(
            "vertices give conics: {vertices_conic}; (4:1:0:1) on Q0Q3 {on_edge}, irreducible {irreducible}, Galois point V4 at image {galois}, \
             not at other vertex images {others}; generic center: {failing}/25 candidates fail"
        ),
    )
}

/// Returns (literal criterion holds, groups distinct, holds on generic curves).
fn rho_and_incidence(curve: &EllipticCurveModel) -> (bool, bool, Vec<String>) {
    let cat = GaloisCatalog::build(curve, DEFAULT_TOL, 8).unwrap();
    let lat = cat.uniformization.lattice();
    let mut distinct = true;
    let mut failures = Vec::new();
    for (k, a) in cat.records.iter().enumerate() {
        for b in &cat.records[k + 1..] {
            let same = a.realization.iter().all(|x| {
                b.realization
                    .iter()
                    .any(|y| elliptic_galois::numeric::projective_distance(&x.matrix.to_numeric(), &y.matrix.to_numeric()) < 1e-8)
            });
            distinct &= !same;
            let (ratio, p) = meet(&a.line.planes, &b.line.planes);
            let meets = ratio < 1e-8;
            let shared = group_intersection(lat, &a.group, &b.group);
            let invs = shared.involutions_with_fixed_points(lat);
            let ok = match (meets, invs.first()) {
                (false, None) => true,
                (true, Some(g)) => {
                    let t = g.alpha.half_period_index().expect("involutions sit at half periods");
                    point_gap(&p, &cat.tetrahedron.vertices[cat.uniformization.curve_involution(t)]) < 1e-8
                }
                _ => false,
            };
            if !ok {
                failures.push(format!("{}/{}", a.label, b.label));
            }
        }
    }
    (failures.is_empty() && distinct, distinct, failures)
}

fn c8() -> Verdict {
    let (literal, distinct, failures) = rho_and_incidence(&lemniscatic());
    let generic_ok = random_curves(3, 8).iter().all(|c| rho_and_incidence(c).0);
    Verdict {
        passed: literal,
        rest_passed: distinct && generic_ok,
        detail: format!(
            "groups distinct {distinct}; incidence <=> shared involution at its vertex fails on j = 1728 for {} pairs ({}): \
             edges Q0Q3 and Q1Q2 meet cyclic lines away from the vertices with trivial group intersection; holds on 3 generic curves: {generic_ok}",
            failures.len(),
            failures.join(", ")
        ),
        elapsed: None,
    }
}

#[test]
fn acceptance_criteria() {
    let budgets = [1, 5, 2, 1, 30, 10, 20, 10].map(Duration::from_secs);
    let checks: [fn() -> Verdict; 8] = [c1, c2, c3, c4, c5, c6, c7, c8];
    let mut unexpected = Vec::new();
    for (k, f) in checks.iter().enumerate() {
        let n = k + 1;
        let start = Instant::now();
        let v = f();
        let took = v.elapsed.unwrap_or_else(|| start.elapsed());
        // debug builds get slack on the time budget; the numbers are printed
        let in_time = took <= budgets[k] * if cfg!(debug_assertions) { 4 } else { 1 };
        let status = if v.passed && in_time { "PASS" } else { "FAIL" };
        println!("criterion {n}: {status} [{:.2}s / {}s] {}", took.as_secs_f64(), budgets[k].as_secs(), v.detail);
        let expected_gap = KNOWN_GAPS.contains(&n);
        if !(v.passed || expected_gap && v.rest_passed) || !in_time {
            unexpected.push(n);
        }
    }
    assert!(unexpected.is_empty(), "criteria failing beyond the recorded gaps: {unexpected:?}");
}
