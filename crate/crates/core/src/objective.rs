use crate::error::{Error, Result};
use crate::linalg::{euclid_distance, norm, Matrix, Vector};
use crate::scalar::Scalar;

/// Slack allowed below the optimal value before a value is treated as a broken problem.
pub const NEGATIVE_GAP_SLACK: f64 = 1e-12;

/// Default numerical stand-in for an exactly vanishing gradient: the
/// square root of the smallest normal number, below which `||g||^2` underflows.
pub fn default_grad_zero_tol<T: Scalar>() -> T {
    T::min_positive_value().sqrt()
}

/// A smooth objective on `R^d` with an analytic gradient.
///
/// Implementations must be immutable after construction so that several
/// runs can evaluate the same instance concurrently.
pub trait Objective<T: Scalar>: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn value(&self, x: &[T]) -> T;

    fn gradient(&self, x: &[T]) -> Vector<T>;

    fn value_grad(&self, x: &[T]) -> (T, Vector<T>) {
        (self.value(x), self.gradient(x))
    }

    /// Analytic Hessian, when the problem ships one.
    fn hessian(&self, _x: &[T]) -> Option<Matrix<T>> {
        None
    }

    /// The known minimum `f*`.
    fn optimal_value(&self) -> T {
        T::zero()
    }

    fn minimizer(&self) -> Option<Vector<T>> {
        None
    }

    /// Problem-specific distance to the solution set; Euclidean distance to
    /// the minimizer unless overridden.
    fn distance(&self, x: &[T]) -> Option<T> {
        self.minimizer()
            .and_then(|m| euclid_distance(x, &m).ok())
    }
}

impl<T: Scalar, O: Objective<T> + ?Sized> Objective<T> for Box<O> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[T]) -> T {
        (**self).value(x)
    }
    fn gradient(&self, x: &[T]) -> Vector<T> {
        (**self).gradient(x)
    }
    fn value_grad(&self, x: &[T]) -> (T, Vector<T>) {
        (**self).value_grad(x)
    }
    fn hessian(&self, x: &[T]) -> Option<Matrix<T>> {
        (**self).hessian(x)
    }
    fn optimal_value(&self) -> T {
        (**self).optimal_value()
    }
    fn minimizer(&self) -> Option<Vector<T>> {
        (**self).minimizer()
    }
    fn distance(&self, x: &[T]) -> Option<T> {
        (**self).distance(x)
    }
}

/// `(f - floor) / ||g||^{4/3}` from an already evaluated value and gradient.
pub fn ratio_from_parts<T: Scalar>(value: T, grad: &[T], floor: T, grad_zero_tol: T) -> Result<T> {
    let gnorm = norm(grad);
    if gnorm <= grad_zero_tol {
        return Err(Error::ZeroGradient {
            norm: gnorm.to_f64_lossy(),
            tol: grad_zero_tol.to_f64_lossy(),
        });
    }
    if value < floor - T::lit(NEGATIVE_GAP_SLACK) {
        return Err(Error::NegativeGap {
            value: value.to_f64_lossy(),
            floor: floor.to_f64_lossy(),
        });
    }
    let four_thirds = T::lit(4.0) / T::lit(3.0);
    Ok((value - floor) / gnorm.powf(four_thirds))
}

/// The regime detector `R(x) = (f(x) - f*) / ||grad f(x)||^{4/3}`.
///
/// Constant on pure quartics and vanishing where the objective is locally
/// quadratic with positive curvature.
pub fn ratio_r<T: Scalar, O: Objective<T> + ?Sized>(obj: &O, x: &[T]) -> Result<T> {
    let (f, g) = obj.value_grad(x);
    ratio_from_parts(f, &g, obj.optimal_value(), default_grad_zero_tol())
}
