use crate::error::{Error, Result};
use crate::linalg::{norm_sq, Vector};
use crate::objective::{default_grad_zero_tol, Objective};
use crate::scalar::Scalar;

/// `x - eta * g`
pub(crate) fn gradient_update<T: Scalar>(x: &[T], grad: &[T], eta: T) -> Vector<T> {
    Vector(x.iter().zip(grad).map(|(&xi, &gi)| xi - eta * gi).collect())
}

/// `x - scale * (f - floor) / ||g||^2 * g`
pub(crate) fn polyak_update<T: Scalar>(x: &[T], value: T, grad: &[T], floor: T, scale: T) -> Vector<T> {
    let step = scale * (value - floor) / norm_sq(grad);
    Vector(x.iter().zip(grad).map(|(&xi, &gi)| xi - step * gi).collect())
}

/// One fixed-step gradient step `x - eta * grad f(x)`.
pub fn gd_step<T: Scalar, O: Objective<T> + ?Sized>(obj: &O, x: &[T], eta: T) -> Vector<T> {
    gradient_update(x, &obj.gradient(x), eta)
}

/// One Polyak step `x - scale * (f(x) - f_floor) / ||grad f(x)||^2 * grad f(x)`.
///
/// `scale = 1` is the plain Polyak step; the lower-bound wrapper uses `1/2`.
pub fn polyak_step<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    x: &[T],
    f_floor: T,
    scale: T,
) -> Result<Vector<T>> {
    let (f, g) = obj.value_grad(x);
    let tol: T = default_grad_zero_tol();
    let gn = g.norm();
    if gn <= tol {
        return Err(Error::ZeroGradient {
            norm: gn.to_f64_lossy(),
            tol: tol.to_f64_lossy(),
        });
    }
    Ok(polyak_update(x, f, &g, f_floor, scale))
}
