//! Seeded randomness. All problem data and samples are drawn from ChaCha8
//! (`rand_chacha::ChaCha8Rng::seed_from_u64`), filling matrices in row-major order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{norm, Matrix, Vector};
use crate::scalar::Scalar;

pub type ExperimentRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> ExperimentRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn standard_normal<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    let z: f64 = rng.sample(StandardNormal);
    T::lit(z)
}

pub fn gaussian_matrix<T: Scalar, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix<T> {
    let data = (0..rows * cols).map(|_| standard_normal(rng)).collect();
    Matrix::from_row_major(rows, cols, data).expect("sized buffer")
}

pub fn gaussian_vector<T: Scalar, R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vector<T> {
    Vector((0..d).map(|_| standard_normal(rng)).collect())
}

/// Uniform sample on the unit sphere of `R^d`.
pub fn unit_sphere<T: Scalar, R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vector<T> {
    loop {
        let v: Vector<T> = gaussian_vector(rng, d);
        let n = norm(&v);
        if n > T::lit(1e-12) {
            return v.scale(T::one() / n);
        }
    }
}

/// Uniform sample in the closed ball of the given radius.
pub fn in_ball<T: Scalar, R: Rng + ?Sized>(rng: &mut R, d: usize, radius: T) -> Vector<T> {
    let dir: Vector<T> = unit_sphere(rng, d);
    let u: f64 = rng.random();
    let r = radius * T::lit(u.powf(1.0 / d as f64));
    dir.scale(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a: Matrix<f64> = gaussian_matrix(&mut seeded(7), 3, 4);
        let b: Matrix<f64> = gaussian_matrix(&mut seeded(7), 3, 4);
        let c: Matrix<f64> = gaussian_matrix(&mut seeded(8), 3, 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn ball_samples_stay_inside() {
        let mut rng = seeded(1);
        for _ in 0..200 {
            let x: Vector<f64> = in_ball(&mut rng, 3, 0.5);
            assert!(x.norm() <= 0.5 + 1e-15);
        }
    }
}
