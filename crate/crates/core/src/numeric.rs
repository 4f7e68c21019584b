//! Small complex linear-algebra helpers for the numeric certificates.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

pub type CVec4 = [Complex64; 4];

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn real4(v: [f64; 4]) -> CVec4 {
    v.map(|x| c64(x, 0.0))
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize(v: &[Complex64]) -> Vec<Complex64> {
    let n = norm(v);
    v.iter().map(|c| c / n).collect()
}

pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Singular values in decreasing order with the matching right singular
/// vectors. Short systems are padded with zero rows, so every direction of
/// the domain appears.
pub fn svd_sorted(rows: &[Vec<Complex64>], ncols: usize) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let nrows = rows.len().max(ncols);
    let m = DMatrix::from_fn(nrows, ncols, |i, j| rows.get(i).map_or(c64(0.0, 0.0), |r| r[j]));
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap());
    let sv = idx.iter().map(|&k| svd.singular_values[k]).collect();
    let vecs = idx
        .iter()
        .map(|&k| (0..ncols).map(|j| v_t[(k, j)].conj()).collect())
        .collect();
    (sv, vecs)
}

/// Orthonormal null space: directions whose singular value is below
/// `rel_tol` times the largest one.
pub fn null_space(rows: &[Vec<Complex64>], ncols: usize, rel_tol: f64) -> (Vec<Vec<Complex64>>, Vec<f64>) {
    let (sv, vecs) = svd_sorted(rows, ncols);
    let top = sv[0].max(f64::MIN_POSITIVE);
    let kernel = sv
        .iter()
        .zip(vecs)
        .filter(|(s, _)| **s <= rel_tol * top)
        .map(|(_, v)| v)
        .collect();
    (kernel, sv)
}

/// The right singular vector of the smallest singular value, with the ratio
/// `σ_min / σ_max` and the next ratio `σ_{n−1} / σ_max`.
pub fn smallest_singular(rows: &[Vec<Complex64>], ncols: usize) -> (Vec<Complex64>, f64, f64) {
    let (sv, mut vecs) = svd_sorted(rows, ncols);
    let top = sv[0].max(f64::MIN_POSITIVE);
    (vecs.pop().unwrap(), sv[ncols - 1] / top, sv[ncols - 2] / top)
}

pub fn mat4(rows: [[Complex64; 4]; 4]) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| rows[i][j])
}

pub fn apply4(m: &Matrix4<Complex64>, v: &CVec4) -> CVec4 {
    let mut out = [c64(0.0, 0.0); 4];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|j| m[(i, j)] * v[j]).sum();
    }
    out
}

/// `vᵀM`, i.e. the pull-back of a plane.
pub fn apply4_left(m: &Matrix4<Complex64>, v: &CVec4) -> CVec4 {
    let mut out = [c64(0.0, 0.0); 4];
    for (j, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|i| v[i] * m[(i, j)]).sum();
    }
    out
}

/// Best `λ` with `a ≈ λb` and the relative residual `|a − λb| / |a|`.
pub fn proportional(a: &[Complex64], b: &[Complex64]) -> (Complex64, f64) {
    let bb: f64 = b.iter().map(|c| c.norm_sqr()).sum();
    let na = norm(a);
    if bb == 0.0 || na == 0.0 {
        return (c64(0.0, 0.0), if na == 0.0 && bb == 0.0 { 0.0 } else { 1.0 });
    }
    let lambda = b.iter().zip(a).map(|(y, x)| y.conj() * x).sum::<Complex64>() / bb;
    let res = a.iter().zip(b).map(|(x, y)| (x - lambda * y).norm_sqr()).sum::<f64>().sqrt();
    (lambda, res / na)
}

pub fn matrix_entries(m: &Matrix4<Complex64>) -> Vec<Complex64> {
    (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect()
}

/// Relative distance of `m` from the scalar matrices.
pub fn scalar_defect(m: &Matrix4<Complex64>) -> f64 {
    let id: Vec<Complex64> = matrix_entries(&Matrix4::identity());
    proportional(&matrix_entries(m), &id).1
}

/// Relative distance between two matrices up to a scalar factor.
pub fn projective_distance(a: &Matrix4<Complex64>, b: &Matrix4<Complex64>) -> f64 {
    proportional(&matrix_entries(a), &matrix_entries(b)).1
}

/// Rescale so the largest entry is `1`.
pub fn normalize_matrix(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let pivot = matrix_entries(m)
        .into_iter()
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .unwrap();
    m.map(|c| c / pivot)
}

pub fn det4(rows: &[CVec4; 4]) -> Complex64 {
    mat4(*rows).determinant()
}
