use crate::error::{Error, Result};
use crate::linalg::{norm, Vector};
use crate::objective::{Objective, NEGATIVE_GAP_SLACK};
use crate::rng::{seeded, unit_sphere};
use crate::scalar::Scalar;

/// Decades spanned by the sampled radii.
const RADIUS_DECADES: f64 = 3.0;

/// Empirical quartic-growth constant `min (f(x) - f*) / dist(x)^4` over
/// `n_samples` points at random directions and log-spaced radii in
/// `[radius * 1e-3, radius]` around the reference minimizer, with the
/// objective's own distance to the solution set. Returns the constant and the minimizing point.
pub fn growth_estimate<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    radius: T,
    n_samples: usize,
    seed: u64,
) -> Result<(T, Vector<T>)> {
    if !(radius > T::zero()) || n_samples == 0 {
        return Err(Error::InvalidConfig("growth_estimate needs radius > 0 and samples > 0".into()));
    }
    let center = obj.minimizer().ok_or(Error::NoMinimizer)?;
    let fstar = obj.optimal_value();
    let mut rng = seeded(seed);
    let mut best: Option<(T, Vector<T>)> = None;
    for i in 0..n_samples {
        let frac = if n_samples > 1 {
            i as f64 / (n_samples - 1) as f64
        } else {
            0.0
        };
        let r = radius * T::lit(10f64.powf(-RADIUS_DECADES * frac));
        let dir: Vector<T> = unit_sphere(&mut rng, obj.dim());
        let x = center.add_scaled(r, &dir);
        let gap = obj.value(&x) - fstar;
        if gap < -T::lit(NEGATIVE_GAP_SLACK) {
            return Err(Error::NegativeGap {
                value: (gap + fstar).to_f64_lossy(),
                floor: fstar.to_f64_lossy(),
            });
        }
        let dist = obj.distance(&x).unwrap_or_else(|| {
            let offset: Vec<T> = x.iter().zip(center.iter()).map(|(&a, &b)| a - b).collect();
            norm(&offset)
        });
        if dist <= T::zero() {
            continue;
        }
        let ratio = gap / dist.powi(4);
        if best.as_ref().is_none_or(|(m, _)| ratio < *m) {
            best = Some((ratio, x));
        }
    }
    best.ok_or(Error::NoMinimizer)
}
