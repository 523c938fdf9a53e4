use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm, Vector};
use crate::objective::Objective;
use crate::rng::{gaussian_vector, seeded};
use crate::scalar::Scalar;

use super::fd::third_form;
use super::split::HessianSplit;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicCheckReport {
    pub base_point: Vec<f64>,
    /// Max over sampled unit `u` in the null space of `|grad^3 f[u, u, u]|`.
    pub max_abs_cubic_uuu: f64,
    /// Max over sampled unit `u` in the null space and all unit `w` of
    /// `|grad^3 f[w, u, u]|`, i.e. of `||grad^3 f[u, u]||`.
    pub max_abs_cubic_uuw: f64,
    pub fd_step: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub passed: bool,
}

/// Samples unit directions `u = Qz / ||Qz||` of the null space and evaluates
/// the pure cubic `grad^3 f[u, u, u]` and the coupling vector `grad^3 f[., u, u]`
/// whose norm is the supremum of `|grad^3 f[w, u, u]|` over unit `w`.
pub fn check_vanishing_cubics<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    base: &[T],
    split: &HessianSplit<T>,
    n_samples: usize,
    h: T,
    tol: f64,
    seed: u64,
) -> Result<CubicCheckReport> {
    if split.null_dim() == 0 {
        return Err(Error::EmptyNullSpace);
    }
    let d = base.len();
    let mut rng = seeded(seed);
    let basis: Vec<Vector<T>> = (0..d).map(|i| Vector::basis(d, i)).collect();
    let (mut max_uuu, mut max_uuw) = (0.0f64, 0.0f64);
    let mut drawn = 0;
    while drawn < n_samples {
        let z: Vector<T> = gaussian_vector(&mut rng, d);
        let qz = split.project_null(&z);
        let n = norm(&qz);
        if n <= T::lit(1e-8) {
            continue;
        }
        let u: Vec<T> = qz.iter().map(|&c| c / n).collect();
        drawn += 1;
        let uuu = third_form(obj, base, &u, &u, &u, h).to_f64_lossy().abs();
        let coupling: Vec<T> = basis
            .iter()
            .map(|e| third_form(obj, base, &u, &u, e, h))
            .collect();
        max_uuu = max_uuu.max(uuu);
        max_uuw = max_uuw.max(norm(&coupling).to_f64_lossy());
    }
    Ok(CubicCheckReport {
        base_point: base.iter().map(|x| x.to_f64_lossy()).collect(),
        max_abs_cubic_uuu: max_uuu,
        max_abs_cubic_uuw: max_uuw,
        fd_step: h.to_f64_lossy(),
        tolerance: tol,
        samples: n_samples,
        passed: max_uuu.is_finite() && max_uuw.is_finite() && max_uuu <= tol && max_uuw <= tol,
    })
}
