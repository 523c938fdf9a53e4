//! Overparameterized factorized models: quadratic sensing and a
//! quadratic-activation single neuron. Both share the loss
//! `f(X) = 1/(2m) sum_i (||X^T a_i||^2 - b_i)^2` over `X` in `R^{d x k}`,
//! stored row-major as a flat vector of length `d * k`.

use crate::error::{Error, Result};
use crate::linalg::{dot, square_svd, Matrix, Vector};
use crate::objective::Objective;
use crate::rng::{gaussian_matrix, gaussian_vector, seeded};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
struct QuadraticFeatures<T> {
    d: usize,
    k: usize,
    /// m x d, one measurement vector per row
    a: Matrix<T>,
    b: Vec<T>,
}

impl<T: Scalar> QuadraticFeatures<T> {
    fn m(&self) -> usize {
        self.a.rows()
    }

    /// `X^T a_i`, a length-k vector.
    fn project(&self, x: &[T], i: usize, z: &mut [T]) {
        z.iter_mut().for_each(|zq| *zq = T::zero());
        for (p, &ap) in self.a.row(i).iter().enumerate() {
            let row = &x[p * self.k..(p + 1) * self.k];
            for (zq, &xpq) in z.iter_mut().zip(row) {
                *zq += ap * xpq;
            }
        }
    }

    fn value(&self, x: &[T]) -> T {
        let mut z = vec![T::zero(); self.k];
        let mut acc = T::zero();
        for i in 0..self.m() {
            self.project(x, i, &mut z);
            let r = dot(&z, &z) - self.b[i];
            acc += r * r;
        }
        acc / (T::lit(2.0) * T::lit(self.m() as f64))
    }

    fn value_grad(&self, x: &[T]) -> (T, Vector<T>) {
        let mut z = vec![T::zero(); self.k];
        let mut grad = vec![T::zero(); self.d * self.k];
        let mut acc = T::zero();
        for i in 0..self.m() {
            self.project(x, i, &mut z);
            let r = dot(&z, &z) - self.b[i];
            acc += r * r;
            for (p, &ap) in self.a.row(i).iter().enumerate() {
                let c = r * ap;
                for (gq, &zq) in grad[p * self.k..(p + 1) * self.k].iter_mut().zip(&z) {
                    *gq += c * zq;
                }
            }
        }
        let m = T::lit(self.m() as f64);
        let two_over_m = T::lit(2.0) / m;
        grad.iter_mut().for_each(|g| *g *= two_over_m);
        (acc / (T::lit(2.0) * m), Vector(grad))
    }

    fn hessian(&self, x: &[T]) -> Matrix<T> {
        let n = self.d * self.k;
        let mut h = Matrix::zeros(n, n);
        let mut z = vec![T::zero(); self.k];
        let mut gr = vec![T::zero(); n];
        let two = T::lit(2.0);
        for i in 0..self.m() {
            self.project(x, i, &mut z);
            let r = dot(&z, &z) - self.b[i];
            let a = self.a.row(i);
            for p in 0..self.d {
                for q in 0..self.k {
                    gr[p * self.k + q] = two * a[p] * z[q];
                }
            }
            for s in 0..n {
                for t in 0..n {
                    h[(s, t)] += gr[s] * gr[t];
                }
            }
            for p in 0..self.d {
                for s in 0..self.d {
                    let c = two * r * a[p] * a[s];
                    for q in 0..self.k {
                        h[(p * self.k + q, s * self.k + q)] += c;
                    }
                }
            }
        }
        let inv_m = T::one() / T::lit(self.m() as f64);
        for s in 0..n {
            for t in 0..n {
                h[(s, t)] *= inv_m;
            }
        }
        h
    }
}

/// Padded target `[X_star | 0]` as a d x k matrix.
fn padded<T: Scalar>(x_star: &Matrix<T>, k: usize) -> Matrix<T> {
    let mut y = Matrix::zeros(x_star.rows(), k);
    for i in 0..x_star.rows() {
        for j in 0..x_star.cols() {
            y[(i, j)] = x_star[(i, j)];
        }
    }
    y
}

/// `min over orthogonal k x k R of ||X R - [X_star | 0]||_F`.
///
/// The minimizing `R = U V^T` comes from the SVD `X^T [X_star | 0] = U S V^T`;
/// the residual is then formed explicitly.
pub fn procrustes_distance<T: Scalar>(x: &[T], x_star: &Matrix<T>, k: usize) -> Result<T> {
    let (d, r) = (x_star.rows(), x_star.cols());
    if k < r {
        return Err(Error::DimensionMismatch { expected: r, got: k });
    }
    if x.len() != d * k {
        return Err(Error::DimensionMismatch {
            expected: d * k,
            got: x.len(),
        });
    }
    let xm = Matrix::from_row_major(d, k, x.to_vec())?;
    let y = padded(x_star, k);
    let cross = xm.transpose().matmul(&y)?;
    let (u, _, v) = square_svd(&cross);
    let rot = u.matmul(&v.transpose())?;
    let aligned = xm.matmul(&rot)?;
    Ok(aligned.sub(&y).frobenius())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SensingSize {
    pub d: usize,
    pub r: usize,
    pub k: usize,
    pub m: usize,
}

impl Default for SensingSize {
    fn default() -> Self {
        SensingSize {
            d: 10,
            r: 1,
            k: 3,
            m: 200,
        }
    }
}

/// Rank-`r` quadratic sensing searched at rank `k > r`: Gaussian measurement
/// rows `a_i`, orthonormalized Gaussian teacher `X_star`, `b_i = ||X_star^T a_i||^2`.
#[derive(Debug, Clone)]
pub struct QuadraticSensing<T> {
    pub size: SensingSize,
    pub seed: u64,
    pub x_star: Matrix<T>,
    feats: QuadraticFeatures<T>,
}

impl<T: Scalar> QuadraticSensing<T> {
    /// Draws, in order from one ChaCha8 stream: `A` (m x d), then `X_star` (d x r).
    pub fn new(size: SensingSize, seed: u64) -> Result<Self> {
        if size.d == 0 || size.r == 0 || size.k < size.r || size.m == 0 {
            return Err(Error::InvalidConfig(format!("invalid sensing size {size:?}")));
        }
        let mut rng = seeded(seed);
        let a = gaussian_matrix(&mut rng, size.m, size.d);
        let mut x_star = gaussian_matrix(&mut rng, size.d, size.r);
        x_star.orthonormalize_columns();
        Self::from_parts(a, x_star, size.k, seed)
    }

    pub fn from_parts(a: Matrix<T>, x_star: Matrix<T>, k: usize, seed: u64) -> Result<Self> {
        if a.cols() != x_star.rows() {
            return Err(Error::DimensionMismatch {
                expected: a.cols(),
                got: x_star.rows(),
            });
        }
        let (m, d, r) = (a.rows(), a.cols(), x_star.cols());
        let b = (0..m)
            .map(|i| {
                let z = x_star.transpose().matvec(a.row(i));
                dot(&z, &z)
            })
            .collect();
        Ok(QuadraticSensing {
            size: SensingSize { d, r, k, m },
            seed,
            x_star,
            feats: QuadraticFeatures { d, k, a, b },
        })
    }

    pub fn measurements(&self) -> &[T] {
        &self.feats.b
    }

    /// `[X_star | 0]` flattened.
    pub fn padded_solution(&self) -> Vector<T> {
        Vector(padded(&self.x_star, self.size.k).as_slice().to_vec())
    }
}

impl<T: Scalar> Objective<T> for QuadraticSensing<T> {
    fn name(&self) -> &str {
        "quadratic_sensing"
    }
    fn dim(&self) -> usize {
        self.size.d * self.size.k
    }
    fn value(&self, x: &[T]) -> T {
        self.feats.value(x)
    }
    fn gradient(&self, x: &[T]) -> Vector<T> {
        self.feats.value_grad(x).1
    }
    fn value_grad(&self, x: &[T]) -> (T, Vector<T>) {
        self.feats.value_grad(x)
    }
    fn hessian(&self, x: &[T]) -> Option<Matrix<T>> {
        Some(self.feats.hessian(x))
    }
    fn minimizer(&self) -> Option<Vector<T>> {
        Some(self.padded_solution())
    }
    fn distance(&self, x: &[T]) -> Option<T> {
        procrustes_distance(x, &self.x_star, self.size.k).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeuronSize {
    pub d: usize,
    pub k: usize,
    pub m: usize,
}

impl Default for NeuronSize {
    fn default() -> Self {
        NeuronSize { d: 10, k: 3, m: 200 }
    }
}

/// Width-`k` student with quadratic activation fit to a unit-norm width-1
/// teacher: `f(X) = 1/(2m) sum_i (||X^T a_i||^2 - (a_i^T x_star)^2)^2`.
///
/// Inputs are drawn `N(0, I/d)` so that the loss curvature is O(1) at the teacher.
#[derive(Debug, Clone)]
pub struct SingleNeuron<T> {
    pub size: NeuronSize,
    pub seed: u64,
    pub x_star: Vector<T>,
    teacher: Matrix<T>,
    feats: QuadraticFeatures<T>,
}

impl<T: Scalar> SingleNeuron<T> {
    /// Draws, in order from one ChaCha8 stream: `A` (m x d), then `x_star` (d).
    pub fn new(size: NeuronSize, seed: u64) -> Result<Self> {
        if size.d == 0 || size.k == 0 || size.m == 0 {
            return Err(Error::InvalidConfig(format!("invalid neuron size {size:?}")));
        }
        let mut rng = seeded(seed);
        let mut a: Matrix<T> = gaussian_matrix(&mut rng, size.m, size.d);
        let s = T::one() / T::lit(size.d as f64).sqrt();
        for i in 0..size.m {
            for j in 0..size.d {
                a[(i, j)] *= s;
            }
        }
        let w: Vector<T> = gaussian_vector(&mut rng, size.d);
        let x_star = w.scale(T::one() / w.norm());
        Self::from_parts(a, x_star, size.k, seed)
    }

    pub fn from_parts(a: Matrix<T>, x_star: Vector<T>, k: usize, seed: u64) -> Result<Self> {
        if a.cols() != x_star.len() {
            return Err(Error::DimensionMismatch {
                expected: a.cols(),
                got: x_star.len(),
            });
        }
        let (m, d) = (a.rows(), a.cols());
        let b = (0..m)
            .map(|i| {
                let z = dot(a.row(i), &x_star);
                z * z
            })
            .collect();
        let teacher = Matrix::from_row_major(d, 1, x_star.0.clone())?;
        Ok(SingleNeuron {
            size: NeuronSize { d, k, m },
            seed,
            x_star,
            teacher,
            feats: QuadraticFeatures { d, k, a, b },
        })
    }

    pub fn padded_solution(&self) -> Vector<T> {
        Vector(padded(&self.teacher, self.size.k).as_slice().to_vec())
    }
}

impl<T: Scalar> Objective<T> for SingleNeuron<T> {
    fn name(&self) -> &str {
        "single_neuron"
    }
    fn dim(&self) -> usize {
        self.size.d * self.size.k
    }
    fn value(&self, x: &[T]) -> T {
        self.feats.value(x)
    }
    fn gradient(&self, x: &[T]) -> Vector<T> {
        self.feats.value_grad(x).1
    }
    fn value_grad(&self, x: &[T]) -> (T, Vector<T>) {
        self.feats.value_grad(x)
    }
    fn hessian(&self, x: &[T]) -> Option<Matrix<T>> {
        Some(self.feats.hessian(x))
    }
    fn minimizer(&self) -> Option<Vector<T>> {
        Some(self.padded_solution())
    }
    fn distance(&self, x: &[T]) -> Option<T> {
        procrustes_distance(x, &self.teacher, self.size.k).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_sensing_hand_example() {
        let a = Matrix::from_rows_f64(&[&[1.0]]);
        let xs = Matrix::from_rows_f64(&[&[1.0]]);
        let p = QuadraticSensing::<f64>::from_parts(a, xs, 1, 0).unwrap();
        let (f, g) = p.value_grad(&[2.0]);
        assert_eq!(f, 4.5);
        assert_eq!(g.0, vec![12.0]);
    }

    #[test]
    fn scalar_neuron_saddle() {
        let a = Matrix::from_rows_f64(&[&[1.0]]);
        let p = SingleNeuron::<f64>::from_parts(a, Vector(vec![1.0]), 1, 0).unwrap();
        let (f, g) = p.value_grad(&[0.0]);
        assert_eq!(f, 0.5);
        assert_eq!(g.0, vec![0.0]);
    }

    #[test]
    fn interpolating_points_have_zero_loss() {
        let p = QuadraticSensing::<f64>::new(SensingSize::default(), 7).unwrap();
        let x = p.padded_solution();
        let (f, g) = p.value_grad(&x);
        assert!(f.abs() < 1e-28);
        assert!(g.norm() < 1e-13);
        assert!(p.distance(&x).unwrap() < 1e-14);

        let n = SingleNeuron::<f64>::new(NeuronSize::default(), 3).unwrap();
        let x = n.padded_solution();
        assert!(n.value(&x) < 1e-28);
        assert!((n.x_star.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn teacher_columns_are_orthonormal() {
        let size = SensingSize { d: 6, r: 2, k: 3, m: 30 };
        let p = QuadraticSensing::<f64>::new(size, 11).unwrap();
        let g = p.x_star.transpose().matmul(&p.x_star).unwrap();
        assert!(g.sub(&Matrix::identity(2)).max_abs() < 1e-14);
    }

    #[test]
    fn procrustes_brute_force_one_dimensional() {
        // R in {+1, -1}
        let xs = Matrix::from_rows_f64(&[&[1.0], &[0.0]]);
        let d = procrustes_distance(&[0.0, 1.0], &xs, 1).unwrap();
        let brute = [1.0f64, -1.0]
            .iter()
            .map(|r| ((0.0 * r - 1.0f64).powi(2) + (1.0 * r - 0.0f64).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min);
        assert!((d - brute).abs() < 1e-15);
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn procrustes_brute_force_planar_rotations() {
        // X is 3 x 2, target [x_star | 0]; sweep rotations and reflections of O(2).
        let xs = Matrix::from_rows_f64(&[&[0.6], &[0.0], &[0.8]]);
        let x = [0.3, -0.2, 0.1, 0.5, 0.7, 0.4];
        let fast = procrustes_distance(&x, &xs, 2).unwrap();
        let mut best = f64::INFINITY;
        let steps = 200_000;
        for s in 0..steps {
            let th = 2.0 * std::f64::consts::PI * s as f64 / steps as f64;
            let (c, sn) = (th.cos(), th.sin());
            for refl in [1.0, -1.0] {
                let r = [[c, -sn * refl], [sn, c * refl]];
                let mut sq = 0.0;
                for i in 0..3 {
                    for j in 0..2 {
                        let xr = x[i * 2] * r[0][j] + x[i * 2 + 1] * r[1][j];
                        let y = if j == 0 { xs[(i, 0)] } else { 0.0 };
                        sq += (xr - y) * (xr - y);
                    }
                }
                best = best.min(sq.sqrt());
            }
        }
        assert!((fast - best).abs() < 1e-9, "fast={fast} brute={best}");
    }

    #[test]
    fn procrustes_orthogonal_invariance() {
        let p = QuadraticSensing::<f64>::new(SensingSize { d: 4, r: 1, k: 3, m: 10 }, 2).unwrap();
        let x = p.padded_solution();
        // permute columns (0 1 2) -> (2 0 1)
        let mut y = x.clone();
        for i in 0..4 {
            y[i * 3] = x[i * 3 + 2];
            y[i * 3 + 1] = x[i * 3];
            y[i * 3 + 2] = x[i * 3 + 1];
        }
        assert!(p.distance(&y).unwrap() < 1e-14);
        assert!(matches!(
            procrustes_distance(&[0.0; 4], &Matrix::<f64>::zeros(4, 2), 1),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
