//! Central finite differences for gradients, Hessians and third derivatives.

use serde::{Deserialize, Serialize};

use crate::linalg::{norm, Matrix, Vector};
use crate::objective::Objective;
use crate::scalar::Scalar;

pub const FD_GRADIENT_STEP: f64 = 1e-5;
pub const FD_HESSIAN_STEP: f64 = 1e-4;
pub const FD_THIRD_STEP: f64 = 1e-3;

fn shifted<T: Scalar>(x: &[T], steps: &[(usize, T)]) -> Vec<T> {
    let mut y = x.to_vec();
    for &(i, s) in steps {
        y[i] += s;
    }
    y
}

/// `(f(x + h e_i) - f(x - h e_i)) / (2h)` per coordinate.
pub fn fd_gradient<T: Scalar, O: Objective<T> + ?Sized>(obj: &O, x: &[T], h: T) -> Vector<T> {
    let two_h = h + h;
    Vector(
        (0..x.len())
            .map(|i| {
                let fp = obj.value(&shifted(x, &[(i, h)]));
                let fm = obj.value(&shifted(x, &[(i, -h)]));
                (fp - fm) / two_h
            })
            .collect(),
    )
}

/// Second differences of values: three-point stencil on the diagonal,
/// four-point stencil off it, then symmetrized.
pub fn fd_hessian<T: Scalar, O: Objective<T> + ?Sized>(obj: &O, x: &[T], h: T) -> Matrix<T> {
    let d = x.len();
    let f0 = obj.value(x);
    let h2 = h * h;
    let four_h2 = T::lit(4.0) * h2;
    let two = T::lit(2.0);
    let mut hess = Matrix::zeros(d, d);
    for i in 0..d {
        let fp = obj.value(&shifted(x, &[(i, h)]));
        let fm = obj.value(&shifted(x, &[(i, -h)]));
        hess[(i, i)] = (fp - two * f0 + fm) / h2;
        for j in (i + 1)..d {
            let fpp = obj.value(&shifted(x, &[(i, h), (j, h)]));
            let fpm = obj.value(&shifted(x, &[(i, h), (j, -h)]));
            let fmp = obj.value(&shifted(x, &[(i, -h), (j, h)]));
            let fmm = obj.value(&shifted(x, &[(i, -h), (j, -h)]));
            let v = (fpp - fpm - fmp + fmm) / four_h2;
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess.symmetrized()
}

/// Analytic Hessian when the objective ships one, else [`fd_hessian`] with the default step.
pub fn hessian_at<T: Scalar, O: Objective<T> + ?Sized>(obj: &O, x: &[T]) -> Matrix<T> {
    obj.hessian(x)
        .unwrap_or_else(|| fd_hessian(obj, x, T::lit(FD_HESSIAN_STEP)))
}

/// `grad^3 f(x)[a, b, c]` as the central difference along `c` of the bilinear
/// form `a^T grad^2 f(x + t c) b`.
pub fn third_form<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    x: &[T],
    a: &[T],
    b: &[T],
    c: &[T],
    h: T,
) -> T {
    let xp: Vec<T> = x.iter().zip(c).map(|(&xi, &ci)| xi + h * ci).collect();
    let xm: Vec<T> = x.iter().zip(c).map(|(&xi, &ci)| xi - h * ci).collect();
    let bp = hessian_at(obj, &xp).bilinear(a, b);
    let bm = hessian_at(obj, &xm).bilinear(a, b);
    (bp - bm) / (h + h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientCheck {
    pub points: usize,
    pub max_rel_err: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Relative error `||fd - g|| / ||g||` of the analytic gradient against
/// [`fd_gradient`], maximized over `points`.
pub fn gradient_check<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    points: &[Vector<T>],
    h: T,
    tol: f64,
) -> GradientCheck {
    let max_rel_err = points
        .iter()
        .map(|x| {
            let g = obj.gradient(x);
            let fd = fd_gradient(obj, x, h);
            let diff: Vec<T> = g.iter().zip(fd.iter()).map(|(&a, &b)| a - b).collect();
            let scale = norm(&g).max(T::lit(1e-12));
            (norm(&diff) / scale).to_f64_lossy()
        })
        .fold(0.0, f64::max);
    GradientCheck {
        points: points.len(),
        max_rel_err,
        tolerance: tol,
        passed: max_rel_err <= tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{ConvexQuartic, NonconvexQuartic, PowerLaw};

    struct Constant;
    impl Objective<f64> for Constant {
        fn name(&self) -> &str {
            "constant"
        }
        fn dim(&self) -> usize {
            3
        }
        fn value(&self, _x: &[f64]) -> f64 {
            2.5
        }
        fn gradient(&self, _x: &[f64]) -> Vector<f64> {
            Vector::zeros(3)
        }
    }

    #[test]
    fn fd_gradient_examples() {
        let q = PowerLaw::quadratic();
        assert!((fd_gradient(&q, &[1.0f64], 1e-5)[0] - 1.0).abs() < 1e-10);
        let g = fd_gradient(&ConvexQuartic, &[0.0f64, 1.0], 1e-5);
        assert!((g[0] - 1.0).abs() < 1e-6 && (g[1] - 8.0).abs() / 8.0 < 1e-6);
        assert_eq!(fd_gradient(&Constant, &[0.1, 0.2, 0.3], 1e-5).0, vec![0.0; 3]);
    }

    #[test]
    fn fd_hessian_at_quartic_origins() {
        for h in [
            fd_hessian(&ConvexQuartic, &[0.0f64, 0.0], 1e-4),
            fd_hessian(&NonconvexQuartic, &[0.0f64, 0.0], 1e-4),
        ] {
            assert!(h.sub(&Matrix::diag(&[1.0, 0.0])).max_abs() <= 1e-6, "{h:?}");
        }
        let h = fd_hessian(&PowerLaw::quadratic(), &[0.37f64], 1e-4);
        assert!((h[(0, 0)] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn fd_hessian_matches_analytic_away_from_origin() {
        let x = [0.3f64, -0.4];
        for obj in [&ConvexQuartic as &dyn Objective<f64>, &NonconvexQuartic] {
            let fd = fd_hessian(obj, &x, 1e-4);
            let an = obj.hessian(&x).unwrap();
            assert!(fd.sub(&an).max_abs() < 1e-6);
        }
    }

    #[test]
    fn third_form_examples() {
        let (eu, ev) = ([0.0f64, 1.0], [1.0f64, 0.0]);
        let o = [0.0f64, 0.0];
        let t = third_form(&NonconvexQuartic, &o, &eu, &eu, &ev, 1e-3);
        assert!((t - 2.0).abs() <= 1e-4);
        let c = [0.6f64, -0.8];
        assert!(third_form(&ConvexQuartic, &o, &eu, &eu, &c, 1e-3).abs() <= 1e-5);
        assert!(third_form(&ConvexQuartic, &o, &eu, &eu, &eu, 1e-3).abs() <= 1e-5);
    }

    #[test]
    fn gradient_check_flags_wrong_gradient() {
        struct Wrong;
        impl Objective<f64> for Wrong {
            fn name(&self) -> &str {
                "wrong"
            }
            fn dim(&self) -> usize {
                1
            }
            fn value(&self, x: &[f64]) -> f64 {
                x[0] * x[0]
            }
            fn gradient(&self, x: &[f64]) -> Vector<f64> {
                Vector(vec![x[0]])
            }
        }
        let pts = vec![Vector(vec![0.5]), Vector(vec![-0.3])];
        assert!(!gradient_check(&Wrong, &pts, 1e-5, 1e-6).passed);
        assert!(gradient_check(&PowerLaw::quadratic(), &pts, 1e-5, 1e-6).passed);
    }
}
