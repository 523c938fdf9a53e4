//! Small dense linear algebra: vectors, row-major matrices, a cyclic Jacobi
//! eigensolver for symmetric matrices and one-sided Jacobi singular values.

use std::ops::{Deref, DerefMut, Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point in `R^d`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector<T>(pub Vec<T>);

impl<T: Scalar> Vector<T> {
    pub fn zeros(d: usize) -> Self {
        Vector(vec![T::zero(); d])
    }

    pub fn from_f64(xs: &[f64]) -> Self {
        Vector(xs.iter().map(|&x| T::lit(x)).collect())
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = Self::zeros(d);
        v.0[i] = T::one();
        v
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn norm(&self) -> T {
        norm(&self.0)
    }

    /// `self + alpha * other`
    pub fn add_scaled(&self, alpha: T, other: &[T]) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Vector(self.iter().zip(other).map(|(&a, &b)| a + alpha * b).collect())
    }

    pub fn scale(&self, alpha: T) -> Self {
        Vector(self.iter().map(|&a| alpha * a).collect())
    }
}

impl<T> Deref for Vector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> DerefMut for Vector<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.0
    }
}

impl<T> From<Vec<T>> for Vector<T> {
    fn from(v: Vec<T>) -> Self {
        Vector(v)
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm_sq<T: Scalar>(a: &[T]) -> T {
    dot(a, a)
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    norm_sq(a).sqrt()
}

/// Euclidean distance `||x - y||_2`.
pub fn euclid_distance<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(x.iter()
        .zip(y)
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum::<T>()
        .sqrt())
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows_f64(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let data = rows
            .iter()
            .flat_map(|row| {
                assert_eq!(row.len(), c, "ragged rows");
                row.iter().map(|&x| T::lit(x))
            })
            .collect();
        Matrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn diag(entries: &[T]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn sub(&self, other: &Matrix<T>) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &Matrix<T>) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn frobenius(&self) -> T {
        norm(&self.data)
    }

    /// `(A + A^T) / 2`
    pub fn symmetrized(&self) -> Self {
        assert_eq!(self.rows, self.cols, "symmetrize needs a square matrix");
        let half = T::lit(0.5);
        let mut s = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                s[(i, j)] = half * (self[(i, j)] + self[(j, i)]);
            }
        }
        s
    }

    /// `a^T M b`
    pub fn bilinear(&self, a: &[T], b: &[T]) -> T {
        dot(a, &self.matvec(b))
    }

    /// Spectral norm of a symmetric matrix, via its eigenvalues.
    pub fn sym_operator_norm(&self) -> T {
        let eig = symmetric_eigen(self);
        eig.values.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// Orthonormalizes the columns in place (modified Gram-Schmidt). Columns
    /// that become numerically dependent are set to zero.
    pub fn orthonormalize_columns(&mut self) {
        let tiny = T::epsilon() * T::lit(64.0);
        for j in 0..self.cols {
            for p in 0..j {
                let mut proj = T::zero();
                for i in 0..self.rows {
                    proj += self[(i, p)] * self[(i, j)];
                }
                for i in 0..self.rows {
                    let v = self[(i, p)];
                    self[(i, j)] -= proj * v;
                }
            }
            let n = norm(&self.column(j));
            let scale = if n > tiny { T::one() / n } else { T::zero() };
            for i in 0..self.rows {
                self[(i, j)] *= scale;
            }
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenpairs of a symmetric matrix: `values` nonincreasing, `vectors` holds
/// the matching unit eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct SymEigen<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition. The input is symmetrized first.
pub fn symmetric_eigen<T: Scalar>(m: &Matrix<T>) -> SymEigen<T> {
    let n = m.rows();
    let mut a = m.symmetrized();
    let mut v = Matrix::identity(n);
    let two = T::lit(2.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        let scale = a.frobenius();
        if off.sqrt() <= T::epsilon() * scale || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .partial_cmp(&a[(i, i)])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, dst)] = v[(k, src)];
        }
    }
    SymEigen { values, vectors }
}

/// Singular values of `m` (nonincreasing) by one-sided Jacobi rotations on the columns.
pub fn singular_values<T: Scalar>(m: &Matrix<T>) -> Vec<T> {
    let mut w = if m.cols() > m.rows() {
        m.transpose()
    } else {
        m.clone()
    };
    let (rows, cols) = (w.rows(), w.cols());
    let two = T::lit(2.0);
    let tol = T::epsilon();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..rows {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == T::zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (two * gamma);
                let t = zeta.signum() / (zeta.abs() + (zeta * zeta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = c * x - s * y;
                    w[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<T> = (0..cols).map(|j| norm(&w.column(j))).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Full SVD `M = U diag(sigma) V^T` of a square matrix by one-sided Jacobi.
/// Singular vectors belonging to numerically zero singular values are
/// completed to an orthonormal basis.
pub fn square_svd<T: Scalar>(m: &Matrix<T>) -> (Matrix<T>, Vec<T>, Matrix<T>) {
    assert_eq!(m.rows(), m.cols(), "square_svd needs a square matrix");
    let n = m.rows();
    let mut w = m.clone();
    let mut v = Matrix::identity(n);
    let two = T::lit(2.0);
    let tol = T::epsilon();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..n {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == T::zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (two * gamma);
                let t = zeta.signum() / (zeta.abs() + (zeta * zeta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = c * t;
                for i in 0..n {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = c * x - s * y;
                    w[(i, q)] = s * x + c * y;
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * x - s * y;
                    v[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<T> = (0..n).map(|j| norm(&w.column(j))).collect();
    let smax = sigma.iter().fold(T::zero(), |a, &b| a.max(b));
    let cutoff = smax * T::epsilon() * T::lit(n as f64 * 16.0);

    // columns with nonzero sigma first so completion sees them
    let mut u = Matrix::zeros(n, n);
    let mut filled = vec![false; n];
    for j in 0..n {
        if sigma[j] > cutoff {
            for i in 0..n {
                u[(i, j)] = w[(i, j)] / sigma[j];
            }
            filled[j] = true;
        }
    }
    let mut candidate = 0;
    for j in 0..n {
        if filled[j] {
            continue;
        }
        loop {
            let mut col = vec![T::zero(); n];
            col[candidate % n] = T::one();
            candidate += 1;
            for p in 0..n {
                if filled[p] {
                    let up = u.column(p);
                    let proj = dot(&up, &col);
                    for i in 0..n {
                        col[i] -= proj * up[i];
                    }
                }
            }
            let cn = norm(&col);
            if cn > T::lit(0.5) {
                for i in 0..n {
                    u[(i, j)] = col[i] / cn;
                }
                filled[j] = true;
                break;
            }
        }
    }
    (u, sigma, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclid_distance_examples() {
        let d = |a: &[f64], b: &[f64]| euclid_distance(a, b).unwrap();
        assert_eq!(d(&[0.0, 0.0], &[0.0, 0.0]), 0.0);
        assert_eq!(d(&[3.0, 4.0], &[0.0, 0.0]), 5.0);
        assert_eq!(d(&[1.0, 1.0], &[1.0, 0.0]), 1.0);
        assert!(matches!(
            euclid_distance(&[1.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn jacobi_reconstructs_symmetric_matrix() {
        let m: Matrix<f64> =
            Matrix::from_rows_f64(&[&[4.0, 1.0, -2.0], &[1.0, 2.0, 0.5], &[-2.0, 0.5, 3.0]]);
        let eig = symmetric_eigen(&m);
        assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        let lam = Matrix::diag(&eig.values);
        let rec = eig
            .vectors
            .matmul(&lam)
            .unwrap()
            .matmul(&eig.vectors.transpose())
            .unwrap();
        assert!(rec.sub(&m).max_abs() < 1e-12);
        let vtv = eig.vectors.transpose().matmul(&eig.vectors).unwrap();
        assert!(vtv.sub(&Matrix::identity(3)).max_abs() < 1e-12);
        let trace: f64 = eig.values.iter().sum();
        assert!((trace - 9.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_handles_diagonal_and_zero() {
        let eig = symmetric_eigen(&Matrix::<f64>::diag(&[0.0, 3.0, 1.0]));
        assert_eq!(eig.values, vec![3.0, 1.0, 0.0]);
        let eig = symmetric_eigen(&Matrix::<f64>::zeros(2, 2));
        assert_eq!(eig.values, vec![0.0, 0.0]);
    }

    #[test]
    fn singular_values_of_rank_one() {
        // u v^T with |u| = 3, |v| = 2
        let m: Matrix<f64> = Matrix::from_rows_f64(&[&[2.0, 0.0, 0.0], &[2.0, 0.0, 0.0], &[-4.0, 0.0, 0.0]]);
        let sv = singular_values(&m);
        assert!((sv[0] - 24f64.sqrt()).abs() < 1e-14);
        assert!(sv[1].abs() < 1e-14 && sv[2].abs() < 1e-14);

        let m: Matrix<f64> = Matrix::from_rows_f64(&[&[3.0, 0.0], &[4.0, 5.0]]);
        let sv = singular_values(&m);
        // sigma1 * sigma2 = |det| = 15, sigma1^2 + sigma2^2 = 50
        assert!((sv[0] * sv[1] - 15.0).abs() < 1e-12);
        assert!((sv[0] * sv[0] + sv[1] * sv[1] - 50.0).abs() < 1e-12);
    }

    #[test]
    fn square_svd_reconstructs_rank_deficient() {
        let m: Matrix<f64> =
            Matrix::from_rows_f64(&[&[1.0, 0.0, 0.0], &[2.0, 0.0, 0.0], &[-0.5, 0.0, 0.0]]);
        let (u, s, v) = square_svd(&m);
        let rec = u.matmul(&Matrix::diag(&s)).unwrap().matmul(&v.transpose()).unwrap();
        assert!(rec.sub(&m).max_abs() < 1e-14);
        let utu = u.transpose().matmul(&u).unwrap();
        assert!(utu.sub(&Matrix::identity(3)).max_abs() < 1e-14);
        let vtv = v.transpose().matmul(&v).unwrap();
        assert!(vtv.sub(&Matrix::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn gram_schmidt_makes_orthonormal_columns() {
        let mut m: Matrix<f64> = Matrix::from_rows_f64(&[&[1.0, 1.0], &[0.0, 1.0], &[1.0, 0.0]]);
        m.orthonormalize_columns();
        let g = m.transpose().matmul(&m).unwrap();
        assert!(g.sub(&Matrix::identity(2)).max_abs() < 1e-14);
    }
}
