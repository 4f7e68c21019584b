use std::fmt;

use serde::Serialize;

use super::{to_array, ProjPoint};
use crate::error::Error;
use crate::exact::{Field, Matrix, Scalar};

/// Quadratic form `vᵀ S v` on P³ given by a symmetric 4×4 matrix.
#[derive(Clone, PartialEq, Serialize)]
pub struct QuadricForm<F = Scalar> {
    sym: Matrix<F>,
}

fn two<F: Field>() -> F {
    F::one() + F::one()
}

impl<F: Field> QuadricForm<F> {
    pub fn from_sym(sym: Matrix<F>) -> Result<Self, Error> {
        if sym.nrows() != 4 || sym.ncols() != 4 || sym != sym.transpose() {
            return Err(Error::InvalidInput("quadric matrix must be symmetric 4x4".into()));
        }
        Ok(QuadricForm { sym })
    }

    /// From monomial coefficients `c_ij` of `X_i X_j` (`i <= j`).
    pub fn from_monomials(terms: &[((usize, usize), F)]) -> Self {
        let mut sym: Matrix<F> = Matrix::zeros(4, 4);
        for ((i, j), c) in terms {
            let (i, j) = if i <= j { (*i, *j) } else { (*j, *i) };
            if i == j {
                sym[(i, i)] = sym[(i, i)].clone() + c.clone();
            } else {
                let half = c.clone() / two::<F>();
                sym[(i, j)] = sym[(i, j)].clone() + half.clone();
                sym[(j, i)] = sym[(j, i)].clone() + half;
            }
        }
        QuadricForm { sym }
    }

    pub fn sym(&self) -> &Matrix<F> {
        &self.sym
    }

    pub fn eval_vec(&self, v: &[F]) -> F {
        let sv = self.sym.apply(v);
        v.iter()
            .zip(&sv)
            .fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn eval(&self, p: &ProjPoint<F>) -> F {
        self.eval_vec(p.coords())
    }

    pub fn vanishes_at(&self, p: &ProjPoint<F>) -> bool {
        self.eval(p).is_zero()
    }

    /// The form `F ∘ M`, i.e. `Mᵀ S M`.
    pub fn pullback(&self, m: &Matrix<F>) -> Self {
        let t = m.transpose();
        QuadricForm {
            sym: &(&t * &self.sym) * m,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut sym = self.sym.clone();
        for i in 0..4 {
            for j in 0..4 {
                sym[(i, j)] = sym[(i, j)].clone() + other.sym[(i, j)].clone();
            }
        }
        QuadricForm { sym }
    }

    pub fn scale(&self, c: &F) -> Self {
        QuadricForm {
            sym: self.sym.scale(c),
        }
    }

    /// Coefficients of the ten monomials `X_i X_j`, `i <= j`, in lexicographic order.
    pub fn monomial_coeffs(&self) -> Vec<F> {
        let mut out = Vec::with_capacity(10);
        for i in 0..4 {
            for j in i..4 {
                if i == j {
                    out.push(self.sym[(i, i)].clone());
                } else {
                    out.push(self.sym[(i, j)].clone() * two::<F>());
                }
            }
        }
        out
    }

    /// Whether this form is a linear combination of `basis`.
    pub fn in_span(&self, basis: &[Self]) -> bool {
        let rows: Vec<Vec<F>> = basis.iter().map(|q| q.monomial_coeffs()).collect();
        let base_rank = Matrix::from_rows(rows.clone()).rank();
        let mut with_self = rows;
        with_self.push(self.monomial_coeffs());
        Matrix::from_rows(with_self).rank() == base_rank
    }

    pub fn is_zero(&self) -> bool {
        self.sym.is_zero()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> QuadricForm<G> {
        QuadricForm {
            sym: self.sym.map(f),
        }
    }
}

impl<F: Field + fmt::Display> fmt::Display for QuadricForm<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["X", "Y", "Z", "W"];
        let mut terms = Vec::new();
        let coeffs = self.monomial_coeffs();
        let mut k = 0;
        for i in 0..4 {
            for j in i..4 {
                let c = &coeffs[k];
                k += 1;
                if !c.is_zero() {
                    terms.push(format!("({c}){}{}", names[i], names[j]));
                }
            }
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl<F: Field> fmt::Debug for QuadricForm<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadricForm({:?})", self.sym)
    }
}

/// Rank of a quadric and its singular points (projectivized kernel).
#[derive(Clone, Debug, PartialEq)]
pub struct SingularLocus<F = Scalar> {
    pub rank: usize,
    pub kernel: Vec<ProjPoint<F>>,
}

impl<F: Field> SingularLocus<F> {
    /// The unique singular point of a rank-3 quadric.
    pub fn vertex(&self) -> Option<&ProjPoint<F>> {
        (self.rank == 3).then(|| &self.kernel[0])
    }
}

pub fn quadric_singular_locus<F: Field>(s: &QuadricForm<F>) -> Result<SingularLocus<F>, Error> {
    if s.is_zero() {
        return Err(Error::InvalidInput("zero quadric".into()));
    }
    let rank = s.sym.rank();
    let kernel = s
        .sym
        .nullspace()
        .into_iter()
        .map(|v| ProjPoint::new(to_array(v)))
        .collect::<Result<_, _>>()?;
    Ok(SingularLocus { rank, kernel })
}
