//! Closed-form low-dimensional test objectives.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::objective::Objective;
use crate::scalar::Scalar;

#[inline]
fn pow4<T: Scalar>(u: T) -> T {
    let u2 = u * u;
    u2 * u2
}

/// `h(x) = c |x|^p` on the real line, `p` in {2, 4}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub coef: f64,
    pub power: u8,
}

impl PowerLaw {
    pub fn new(coef: f64, power: u8) -> Self {
        assert!(power == 2 || power == 4, "PowerLaw supports p = 2 or 4");
        assert!(coef > 0.0);
        PowerLaw { coef, power }
    }

    /// `x^4`
    pub fn quartic() -> Self {
        PowerLaw::new(1.0, 4)
    }

    /// `x^2 / 2`
    pub fn quadratic() -> Self {
        PowerLaw::new(0.5, 2)
    }
}

impl<T: Scalar> Objective<T> for PowerLaw {
    fn name(&self) -> &str {
        match self.power {
            4 => "quartic_1d",
            _ => "quadratic_1d",
        }
    }

    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &[T]) -> T {
        T::lit(self.coef) * x[0].powi(self.power as i32)
    }

    fn gradient(&self, x: &[T]) -> Vector<T> {
        let p = self.power as i32;
        Vector(vec![T::lit(self.coef * p as f64) * x[0].powi(p - 1)])
    }

    fn hessian(&self, x: &[T]) -> Option<Matrix<T>> {
        let p = self.power as i32;
        let c = T::lit(self.coef * (p * (p - 1)) as f64);
        Some(Matrix::diag(&[c * x[0].powi(p - 2)]))
    }

    fn minimizer(&self) -> Option<Vector<T>> {
        Some(Vector::zeros(1))
    }
}

/// `f(v, u) = (v + u^4)^2 / 2 + u^4`, coordinates ordered `(v, u)`.
///
/// Convex near the origin, Hessian `diag(1, 0)` there, ravine `v = -u^4`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ConvexQuartic;

impl<T: Scalar> Objective<T> for ConvexQuartic {
    fn name(&self) -> &str {
        "convex_quartic"
    }

    fn dim(&self) -> usize {
        2
    }

    fn value(&self, x: &[T]) -> T {
        let (v, u) = (x[0], x[1]);
        let u4 = pow4(u);
        let s = v + u4;
        T::lit(0.5) * s * s + u4
    }

    fn gradient(&self, x: &[T]) -> Vector<T> {
        let (v, u) = (x[0], x[1]);
        let s = v + pow4(u);
        let four_u3 = T::lit(4.0) * u.powi(3);
        Vector(vec![s, four_u3 * s + four_u3])
    }

    fn hessian(&self, x: &[T]) -> Option<Matrix<T>> {
        let (v, u) = (x[0], x[1]);
        let s = v + pow4(u);
        let twelve_u2 = T::lit(12.0) * u * u;
        let h_vu = T::lit(4.0) * u.powi(3);
        let h_uu = twelve_u2 * s + T::lit(16.0) * u.powi(6) + twelve_u2;
        let mut h = Matrix::zeros(2, 2);
        h[(0, 0)] = T::one();
        h[(0, 1)] = h_vu;
        h[(1, 0)] = h_vu;
        h[(1, 1)] = h_uu;
        Some(h)
    }

    fn minimizer(&self) -> Option<Vector<T>> {
        Some(Vector::zeros(2))
    }
}

/// `g(v, u) = (v + u^2)^2 / 2 + u^4`, coordinates ordered `(v, u)`.
///
/// Same Hessian at the origin as [`ConvexQuartic`] but the cubic coupling
/// `grad^3 g(0)[e_u, e_u, e_v] = 2` does not vanish; ravine `v = -u^2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NonconvexQuartic;

impl<T: Scalar> Objective<T> for NonconvexQuartic {
    fn name(&self) -> &str {
        "nonconvex_quartic"
    }

    fn dim(&self) -> usize {
        2
    }

    fn value(&self, x: &[T]) -> T {
        let (v, u) = (x[0], x[1]);
        let s = v + u * u;
        T::lit(0.5) * s * s + pow4(u)
    }

    fn gradient(&self, x: &[T]) -> Vector<T> {
        let (v, u) = (x[0], x[1]);
        let s = v + u * u;
        Vector(vec![s, T::lit(2.0) * u * s + T::lit(4.0) * u.powi(3)])
    }

    fn hessian(&self, x: &[T]) -> Option<Matrix<T>> {
        let (v, u) = (x[0], x[1]);
        let s = v + u * u;
        let h_vu = T::lit(2.0) * u;
        let h_uu = T::lit(2.0) * s + T::lit(16.0) * u * u;
        let mut h = Matrix::zeros(2, 2);
        h[(0, 0)] = T::one();
        h[(0, 1)] = h_vu;
        h[(1, 0)] = h_vu;
        h[(1, 1)] = h_uu;
        Some(h)
    }

    fn minimizer(&self) -> Option<Vector<T>> {
        Some(Vector::zeros(2))
    }
}

/// `f(x, y) = (1 - x)^2 + 100 (y - x^2)^4`, minimizer `(1, 1)`.
///
/// The Hessian at the minimizer is `diag(2, 0)`: quadratic across the valley,
/// quartic along it.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QuarticRosenbrock;

impl<T: Scalar> Objective<T> for QuarticRosenbrock {
    fn name(&self) -> &str {
        "quartic_rosenbrock"
    }

    fn dim(&self) -> usize {
        2
    }

    fn value(&self, p: &[T]) -> T {
        let (x, y) = (p[0], p[1]);
        let a = T::one() - x;
        let w = y - x * x;
        a * a + T::lit(100.0) * pow4(w)
    }

    fn gradient(&self, p: &[T]) -> Vector<T> {
        let (x, y) = (p[0], p[1]);
        let w3 = (y - x * x).powi(3);
        Vector(vec![
            -T::lit(2.0) * (T::one() - x) - T::lit(800.0) * x * w3,
            T::lit(400.0) * w3,
        ])
    }

    fn hessian(&self, p: &[T]) -> Option<Matrix<T>> {
        let (x, y) = (p[0], p[1]);
        let w = y - x * x;
        let w2 = w * w;
        let mut h = Matrix::zeros(2, 2);
        h[(0, 0)] = T::lit(2.0) - T::lit(800.0) * w2 * w + T::lit(4800.0) * x * x * w2;
        h[(0, 1)] = -T::lit(2400.0) * x * w2;
        h[(1, 0)] = h[(0, 1)];
        h[(1, 1)] = T::lit(1200.0) * w2;
        Some(h)
    }

    fn minimizer(&self) -> Option<Vector<T>> {
        Some(Vector(vec![T::one(), T::one()]))
    }
}

/// Sampled ravine curves `(v, u)`: `v = -u^4` for the convex quartic,
/// `v = -u^2` for the nonconvex one.
pub fn ravine_curve<T: Scalar>(problem_id: &str, u_samples: &[T]) -> Result<Vec<(T, T)>> {
    let curve: fn(T) -> T = match problem_id {
        "convex_quartic" => pow4,
        "nonconvex_quartic" => |u| u * u,
        other => return Err(Error::UnknownProblem(other.to_string())),
    };
    Ok(u_samples.iter().map(|&u| (-curve(u), u)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vg<O: Objective<f64>>(o: &O, x: &[f64]) -> (f64, Vec<f64>) {
        let (f, g) = o.value_grad(x);
        (f, g.into_inner())
    }

    #[test]
    fn convex_quartic_examples() {
        assert_eq!(vg(&ConvexQuartic, &[0.0, 0.0]), (0.0, vec![0.0, 0.0]));
        assert_eq!(vg(&ConvexQuartic, &[0.0, 1.0]), (1.5, vec![1.0, 8.0]));
        assert_eq!(vg(&ConvexQuartic, &[1.0, 0.0]), (0.5, vec![1.0, 0.0]));
    }

    #[test]
    fn nonconvex_quartic_examples() {
        assert_eq!(vg(&NonconvexQuartic, &[0.0, 0.0]), (0.0, vec![0.0, 0.0]));
        assert_eq!(vg(&NonconvexQuartic, &[0.0, 1.0]), (1.5, vec![1.0, 6.0]));
        assert_eq!(vg(&NonconvexQuartic, &[-1.0, 1.0]), (1.0, vec![0.0, 4.0]));
    }

    #[test]
    fn rosenbrock_examples() {
        assert_eq!(vg(&QuarticRosenbrock, &[1.0, 1.0]), (0.0, vec![0.0, 0.0]));
        assert_eq!(vg(&QuarticRosenbrock, &[0.0, 0.0]), (1.0, vec![-2.0, 0.0]));
        assert_eq!(vg(&QuarticRosenbrock, &[1.0, 2.0]), (100.0, vec![-800.0, 400.0]));
    }

    #[test]
    fn hessians_at_minimizers() {
        let h: Matrix<f64> = ConvexQuartic.hessian(&[0.0, 0.0]).unwrap();
        assert_eq!(h, Matrix::diag(&[1.0, 0.0]));
        let h: Matrix<f64> = NonconvexQuartic.hessian(&[0.0, 0.0]).unwrap();
        assert_eq!(h, Matrix::diag(&[1.0, 0.0]));
        let h: Matrix<f64> = QuarticRosenbrock.hessian(&[1.0, 1.0]).unwrap();
        assert_eq!(h, Matrix::diag(&[2.0, 0.0]));
    }

    #[test]
    fn ravine_samples() {
        let c = ravine_curve("convex_quartic", &[0.0, 1.0]).unwrap();
        assert_eq!(c, vec![(-0.0, 0.0), (-1.0, 1.0)]);
        let c = ravine_curve("nonconvex_quartic", &[0.5f64]).unwrap();
        assert_eq!(c, vec![(-0.25, 0.5)]);
        assert!(matches!(
            ravine_curve::<f64>("rosenbrock", &[0.0]),
            Err(Error::UnknownProblem(_))
        ));
    }

    #[test]
    fn quartics_vanish_only_at_origin() {
        // grid of spacing 1e-2 on [-1, 1]^2
        let n = 200;
        for i in 0..=n {
            for j in 0..=n {
                let v = -1.0 + 2.0 * i as f64 / n as f64;
                let u = -1.0 + 2.0 * j as f64 / n as f64;
                let origin = i == n / 2 && j == n / 2;
                for f in [
                    Objective::<f64>::value(&ConvexQuartic, &[v, u]),
                    Objective::<f64>::value(&NonconvexQuartic, &[v, u]),
                ] {
                    if origin {
                        assert_eq!(f, 0.0);
                    } else {
                        assert!(f > 0.0, "f({v},{u}) = {f}");
                    }
                }
            }
        }
    }

    #[test]
    fn convex_quartic_is_nonnegative_and_single_precision_agrees() {
        let f32v: f32 = ConvexQuartic.value(&[0.25f32, -0.5]);
        let f64v: f64 = ConvexQuartic.value(&[0.25f64, -0.5]);
        assert!((f32v as f64 - f64v).abs() < 1e-6);
        assert!(f64v >= 0.0);
    }
}
