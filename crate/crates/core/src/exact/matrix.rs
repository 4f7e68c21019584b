use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use serde::Serialize;

use super::Field;

/// Small dense row-major matrix over an exact field.
#[derive(Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Matrix<F> {
    rows: Vec<Vec<F>>,
}

impl<F: Field> Matrix<F> {
    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        if let Some(first) = rows.first() {
            assert!(
                rows.iter().all(|r| r.len() == first.len()),
                "ragged matrix rows"
            );
        }
        Matrix { rows }
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Matrix {
            rows: vec![vec![F::zero(); m]; n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i][i] = F::one();
        }
        m
    }

    pub fn diagonal(entries: Vec<F>) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m.rows[i][i] = e;
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn rows(&self) -> &[Vec<F>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.rows[i]
    }

    pub fn transpose(&self) -> Self {
        let (n, m) = (self.nrows(), self.ncols());
        let mut t = Self::zeros(m, n);
        for i in 0..n {
            for j in 0..m {
                t.rows[j][i] = self.rows[i][j].clone();
            }
        }
        t
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(&f).collect())
                .collect(),
        }
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.ncols(), "dimension mismatch");
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .zip(v)
                    .fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// Row vector times matrix.
    pub fn apply_left(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.nrows(), "dimension mismatch");
        (0..self.ncols())
            .map(|j| {
                v.iter()
                    .zip(&self.rows)
                    .fold(F::zero(), |acc, (a, r)| acc + a.clone() * r[j].clone())
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(F::is_zero)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut a = self.rows.clone();
        let (n, m) = (self.nrows(), self.ncols());
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m {
            if r == n {
                break;
            }
            let Some(p) = (r..n).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let inv = F::one() / a[r][c].clone();
            for x in a[r].iter_mut() {
                *x = x.clone() * inv.clone();
            }
            for i in 0..n {
                if i != r && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for j in 0..m {
                        let v = a[r][j].clone();
                        a[i][j] = a[i][j].clone() - f.clone() * v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (Matrix { rows: a }, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel. Each vector has a 1 in one free column and
    /// zeros in the other free columns.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.rref();
        let m = self.ncols();
        (0..m)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![F::zero(); m];
                v[free] = F::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r.rows[row][free].clone();
                }
                v
            })
            .collect()
    }

    /// Determinant by Gaussian elimination.
    pub fn det(&self) -> F {
        let n = self.nrows();
        assert_eq!(n, self.ncols(), "determinant of a non-square matrix");
        let mut a = self.rows.clone();
        let mut det = F::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
                return F::zero();
            };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            let piv = a[c][c].clone();
            det = det * piv.clone();
            for i in c + 1..n {
                if a[i][c].is_zero() {
                    continue;
                }
                let f = a[i][c].clone() / piv.clone();
                for j in c..n {
                    let v = a[c][j].clone();
                    a[i][j] = a[i][j].clone() - f.clone() * v;
                }
            }
        }
        det
    }

    /// Inverse, when the matrix is square and nonsingular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.nrows();
        if n != self.ncols() {
            return None;
        }
        let aug: Vec<Vec<F>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.clone();
                row.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
                row
            })
            .collect();
        let (r, pivots) = Matrix { rows: aug }.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix {
            rows: r.rows.into_iter().map(|row| row[n..].to_vec()).collect(),
        })
    }

    /// The scalar `λ` with `self = λ·other`, if one exists.
    pub fn proportionality(&self, other: &Self) -> Option<F> {
        proportionality(
            self.rows.iter().flatten(),
            other.rows.iter().flatten(),
        )
    }

    /// True when the matrix equals a scalar multiple of the identity.
    pub fn is_scalar(&self) -> bool {
        let n = self.nrows();
        n == self.ncols()
            && self.proportionality(&Self::identity(n)).is_some()
    }
}

/// The scalar `λ` with `a = λ·b` (componentwise) if one exists and `b ≠ 0`.
pub fn proportionality<'a, F: Field + 'a>(
    a: impl IntoIterator<Item = &'a F>,
    b: impl IntoIterator<Item = &'a F>,
) -> Option<F> {
    let pairs: Vec<(&F, &F)> = a.into_iter().zip(b).collect();
    let (ka, kb) = pairs.iter().find(|(_, y)| !y.is_zero())?;
    let lambda = (*ka).clone() / (*kb).clone();
    pairs
        .iter()
        .all(|(x, y)| (*x).clone() == lambda.clone() * (*y).clone())
        .then_some(lambda)
}

impl<F: Field> Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.rows[i][j]
    }
}

impl<F: Field> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.rows[i][j]
    }
}

impl<'a, F: Field> Mul<&'a Matrix<F>> for &'a Matrix<F> {
    type Output = Matrix<F>;
    fn mul(self, rhs: &'a Matrix<F>) -> Matrix<F> {
        assert_eq!(self.ncols(), rhs.nrows(), "dimension mismatch");
        let (n, k, m) = (self.nrows(), self.ncols(), rhs.ncols());
        let mut out = Matrix::zeros(n, m);
        for i in 0..n {
            for j in 0..m {
                let mut acc = F::zero();
                for t in 0..k {
                    acc = acc + self.rows[i][t].clone() * rhs.rows[t][j].clone();
                }
                out.rows[i][j] = acc;
            }
        }
        out
    }
}

impl<F: Field + fmt::Display> fmt::Display for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Scalar;

    fn m(rows: &[&[i64]]) -> Matrix<Scalar> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(a.rank(), 1);
        let ker = a.nullspace();
        assert_eq!(ker.len(), 2);
        for v in ker {
            assert!(a.apply(&v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn determinant_and_inverse() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(a.det(), Scalar::from_int(18));
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Matrix::identity(3));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn scalar_detection() {
        assert!(m(&[&[3, 0], &[0, 3]]).is_scalar());
        assert!(!m(&[&[3, 0], &[0, -3]]).is_scalar());
    }
}
