use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm_sq, singular_values, symmetric_eigen, Matrix};
use crate::scalar::Scalar;

/// Relative null tolerance used when none is given: `1e-6 * max |eigenvalue|`.
pub const DEFAULT_RELATIVE_NULL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitWarning {
    /// Hessian is nonsingular; the null-space projector is zero.
    NoneNull,
}

/// Range/null splitting of a symmetric Hessian: `P` projects onto the span
/// of eigenvectors with `|lambda| > null_tol`, `Q = ` the complementary projector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianSplit<T> {
    pub hessian: Matrix<T>,
    /// Nonincreasing.
    pub eigvals: Vec<T>,
    pub null_tol: T,
    pub p: Matrix<T>,
    pub q: Matrix<T>,
    /// Smallest retained eigenvalue.
    pub mu: T,
    pub warning: Option<SplitWarning>,
}

impl<T: Scalar> HessianSplit<T> {
    pub fn dim(&self) -> usize {
        self.hessian.rows()
    }

    pub fn null_dim(&self) -> usize {
        self.eigvals.iter().filter(|l| l.abs() <= self.null_tol).count()
    }

    /// Split with `Q = I`, for objectives whose Hessian vanishes at the base point.
    pub fn all_null(hessian: Matrix<T>) -> Self {
        let d = hessian.rows();
        let eigvals = symmetric_eigen(&hessian).values;
        HessianSplit {
            hessian,
            eigvals,
            null_tol: T::infinity(),
            p: Matrix::zeros(d, d),
            q: Matrix::identity(d),
            mu: T::zero(),
            warning: None,
        }
    }

    pub fn project_range(&self, x: &[T]) -> Vec<T> {
        self.p.matvec(x)
    }

    pub fn project_null(&self, x: &[T]) -> Vec<T> {
        self.q.matvec(x)
    }

    /// Largest entrywise defect of `P^2 = P`, `Q^2 = Q`, `P + Q = I`, `PQ = 0`.
    pub fn projector_defect(&self) -> T {
        let d = self.dim();
        let pp = self.p.matmul(&self.p).expect("square");
        let qq = self.q.matmul(&self.q).expect("square");
        let pq = self.p.matmul(&self.q).expect("square");
        [
            pp.sub(&self.p).max_abs(),
            qq.sub(&self.q).max_abs(),
            self.p.add(&self.q).sub(&Matrix::identity(d)).max_abs(),
            pq.max_abs(),
        ]
        .into_iter()
        .fold(T::zero(), T::max)
    }

    /// Operator norm of `H Q`.
    pub fn hq_norm(&self) -> T {
        let hq = self.hessian.matmul(&self.q).expect("square");
        singular_values(&hq).first().copied().unwrap_or(T::zero())
    }
}

/// Eigendecomposition-based splitting with an explicit null tolerance.
pub fn eigen_split<T: Scalar>(h: &Matrix<T>, null_tol: T) -> Result<HessianSplit<T>> {
    let hs = h.symmetrized();
    let d = hs.rows();
    let eig = symmetric_eigen(&hs);
    let mut p = Matrix::zeros(d, d);
    let mut q = Matrix::zeros(d, d);
    let mut mu: Option<T> = None;
    for (j, &lam) in eig.values.iter().enumerate() {
        let v = eig.vectors.column(j);
        let target = if lam.abs() > null_tol {
            mu = Some(mu.map_or(lam, |m| m.min(lam)));
            &mut p
        } else {
            &mut q
        };
        for r in 0..d {
            for c in 0..d {
                target[(r, c)] += v[r] * v[c];
            }
        }
    }
    let mu = mu.ok_or(Error::AllNull)?;
    let warning = (norm_sq(q.as_slice()) == T::zero()).then_some(SplitWarning::NoneNull);
    Ok(HessianSplit {
        hessian: hs,
        eigvals: eig.values,
        null_tol,
        p,
        q,
        mu,
        warning,
    })
}

/// [`eigen_split`] with `null_tol = 1e-6 * max |eigenvalue|`.
pub fn eigen_split_relative<T: Scalar>(h: &Matrix<T>) -> Result<HessianSplit<T>> {
    let scale = h.sym_operator_norm();
    eigen_split(h, T::lit(DEFAULT_RELATIVE_NULL_TOL) * scale)
}
