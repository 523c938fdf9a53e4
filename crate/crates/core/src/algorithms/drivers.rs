use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm, norm_sq, Vector};
use crate::objective::{Objective, NEGATIVE_GAP_SLACK};
use crate::run::{IterRecord, RunConfig, RunTrace, StepKind, StopKind, Termination};
use crate::scalar::Scalar;

use super::steps::{gradient_update, polyak_update};

/// Values above this abort a run as divergent.
pub const DIVERGENCE_VALUE: f64 = 1e12;

/// Fixed pattern of `block_len` gradient steps followed by one Polyak step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockSchedule<T> {
    pub gd_stepsize: T,
    pub block_len: usize,
}

impl<T: Scalar> BlockSchedule<T> {
    pub fn new(gd_stepsize: T, block_len: usize) -> Result<Self> {
        if !(gd_stepsize > T::zero()) {
            return Err(Error::InvalidConfig("block stepsize must be positive".into()));
        }
        if block_len == 0 {
            return Err(Error::InvalidConfig("block_len must be at least 1".into()));
        }
        Ok(BlockSchedule {
            gd_stepsize,
            block_len,
        })
    }

    /// Step kind taken at iteration `k`.
    pub fn kind_at(&self, k: usize) -> StepKind {
        if k % (self.block_len + 1) < self.block_len {
            StepKind::Gradient
        } else {
            StepKind::Polyak
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Policy<T> {
    /// Polyak when `R >= tau`, else gradient.
    Adaptive { tau: T },
    Gradient,
    Polyak,
    Block(BlockSchedule<T>),
}

struct Driver<T> {
    policy: Policy<T>,
    eta: T,
    /// Value subtracted in the Polyak step and in `R`.
    floor: T,
    polyak_scale: T,
    /// End the run with [`Termination::Diverged`] instead of failing.
    tolerate_divergence: bool,
}

impl<T: Scalar> Driver<T> {
    fn run<O: Objective<T> + ?Sized>(&self, obj: &O, x0: &[T], cfg: &RunConfig<T>) -> Result<RunTrace<T>> {
        cfg.validate()?;
        if x0.len() != obj.dim() {
            return Err(Error::DimensionMismatch {
                expected: obj.dim(),
                got: x0.len(),
            });
        }
        let optimal = obj.optimal_value();
        let slack = T::lit(NEGATIVE_GAP_SLACK);
        let four_thirds = T::lit(4.0) / T::lit(3.0);
        let divergence = T::lit(DIVERGENCE_VALUE);

        let mut x = Vector(x0.to_vec());
        let mut records = Vec::with_capacity(cfg.max_iters.min(1 << 16) + 1);
        let mut iterates = cfg.keep_iterates.then(Vec::new);
        let mut best = (T::infinity(), x.clone());
        let mut prev_x: Option<Vector<T>> = None;

        let terminated_by = loop {
            let k = records.len();
            let (f, g) = obj.value_grad(&x);
            if !x.is_finite() || !f.is_finite() || !g.is_finite() || f > divergence {
                match prev_x.take() {
                    Some(last) if self.tolerate_divergence => {
                        x = last;
                        break Termination::Diverged;
                    }
                    _ => return Err(Error::NonFinite { iteration: k }),
                }
            }
            if f < self.floor - slack {
                return Err(Error::NegativeGap {
                    value: f.to_f64_lossy(),
                    floor: self.floor.to_f64_lossy(),
                });
            }
            let gnorm = norm(&g);
            let grad_zero = gnorm <= cfg.grad_zero_tol;
            let ratio = (!grad_zero).then(|| (f - self.floor) / gnorm.powf(four_thirds));
            let distance = obj.distance(&x);
            let proj_grad_sq = cfg.g_projector.as_ref().map(|p| norm_sq(&p.matvec(&g)));
            if f < best.0 {
                best = (f, x.clone());
            }
            if let Some(it) = iterates.as_mut() {
                it.push(x.clone());
            }

            let diagnostic = match cfg.stop.kind {
                StopKind::Distance => distance,
                StopKind::GradientNorm => Some(gnorm),
                StopKind::ValueGap => Some(f - optimal),
            };
            let stop = if diagnostic.is_some_and(|d| d <= cfg.stop.threshold) {
                Some(Termination::StopRule)
            } else if grad_zero {
                Some(Termination::ZeroGradient)
            } else if k >= cfg.max_iters {
                Some(Termination::Budget)
            } else {
                None
            };

            let step_kind = match stop {
                Some(_) => StepKind::None,
                None => match self.policy {
                    Policy::Adaptive { tau } => {
                        if ratio.is_some_and(|r| r >= tau) {
                            StepKind::Polyak
                        } else {
                            StepKind::Gradient
                        }
                    }
                    Policy::Gradient => StepKind::Gradient,
                    Policy::Polyak => StepKind::Polyak,
                    Policy::Block(s) => s.kind_at(k),
                },
            };
            records.push(IterRecord {
                k,
                f_val: f,
                grad_norm: gnorm,
                ratio_r: ratio,
                step_kind,
                distance,
                proj_grad_sq,
            });
            if let Some(t) = stop {
                break t;
            }
            let next = match step_kind {
                StepKind::Gradient => gradient_update(&x, &g, self.eta),
                StepKind::Polyak => polyak_update(&x, f, &g, self.floor, self.polyak_scale),
                StepKind::None => unreachable!("terminal records break the loop"),
            };
            prev_x = Some(std::mem::replace(&mut x, next));
        };

        Ok(RunTrace {
            records,
            config: cfg.clone(),
            problem_name: obj.name().to_string(),
            seed: 0,
            terminated_by,
            optimal_value: optimal,
            final_point: x,
            best_point: best.1,
            iterates,
        })
    }
}

/// Adaptive gradient/Polyak switching: from `x_k`, take a Polyak step when
/// `R(x_k) = (f(x_k) - f_floor) / ||grad f(x_k)||^{4/3} >= tau`, otherwise a
/// gradient step of length `eta`. Stops on the configured rule, the
/// iteration budget, or a numerically zero gradient.
pub fn run_adaptive<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    x0: &[T],
    cfg: &RunConfig<T>,
    f_floor: T,
    polyak_scale: T,
) -> Result<RunTrace<T>> {
    check_scale(polyak_scale)?;
    Driver {
        policy: Policy::Adaptive { tau: cfg.tau },
        eta: cfg.eta,
        floor: f_floor,
        polyak_scale,
        tolerate_divergence: false,
    }
    .run(obj, x0, cfg)
}

/// Fixed-step gradient descent with stepsize `eta` (overrides `cfg.eta`).
pub fn run_gd<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    x0: &[T],
    eta: T,
    cfg: &RunConfig<T>,
) -> Result<RunTrace<T>> {
    if !(eta > T::zero()) {
        return Err(Error::InvalidConfig("eta must be positive".into()));
    }
    Driver {
        policy: Policy::Gradient,
        eta,
        floor: obj.optimal_value(),
        polyak_scale: T::one(),
        tolerate_divergence: false,
    }
    .run(obj, x0, cfg)
}

/// Every step a Polyak step with the known optimal value.
pub fn run_polyak<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    x0: &[T],
    cfg: &RunConfig<T>,
) -> Result<RunTrace<T>> {
    Driver {
        policy: Policy::Polyak,
        eta: cfg.eta,
        floor: obj.optimal_value(),
        polyak_scale: T::one(),
        tolerate_divergence: false,
    }
    .run(obj, x0, cfg)
}

/// Block-scheduled baseline: `block_len` gradient steps, then one Polyak step, repeated.
pub fn run_block_gdpolyak<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    x0: &[T],
    sched: &BlockSchedule<T>,
    cfg: &RunConfig<T>,
) -> Result<RunTrace<T>> {
    let sched = BlockSchedule::new(sched.gd_stepsize, sched.block_len)?;
    Driver {
        policy: Policy::Block(sched),
        eta: sched.gd_stepsize,
        floor: obj.optimal_value(),
        polyak_scale: T::one(),
        tolerate_divergence: false,
    }
    .run(obj, x0, cfg)
}

/// [`run_adaptive`] for one wrapper epoch: leaving the finite region ends
/// the epoch instead of failing it.
pub(crate) fn run_adaptive_epoch<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    x0: &[T],
    cfg: &RunConfig<T>,
    f_floor: T,
    polyak_scale: T,
) -> Result<RunTrace<T>> {
    check_scale(polyak_scale)?;
    Driver {
        policy: Policy::Adaptive { tau: cfg.tau },
        eta: cfg.eta,
        floor: f_floor,
        polyak_scale,
        tolerate_divergence: true,
    }
    .run(obj, x0, cfg)
}

fn check_scale<T: Scalar>(scale: T) -> Result<()> {
    if scale > T::zero() && scale <= T::one() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("polyak scale must lie in (0, 1], got {scale}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{ConvexQuartic, PowerLaw};
    use crate::run::StopRule;

    fn cfg(eta: f64, tau: f64, iters: usize, dist: f64) -> RunConfig<f64> {
        RunConfig::new(eta, tau, iters, StopRule::distance(dist)).unwrap()
    }

    #[test]
    fn quartic_trigger_dichotomy() {
        let h = PowerLaw::quartic();
        let t = run_adaptive(&h, &[1.0], &cfg(0.1, 0.15, 40, 1e-300), 0.0, 1.0).unwrap();
        let kinds = t.step_kinds();
        assert!(kinds[..kinds.len() - 1].iter().all(|&s| s == StepKind::Polyak));
        assert_eq!(kinds.len(), 41);
        let d: Vec<f64> = t.records.iter().map(|r| r.distance.unwrap()).collect();
        for (k, dk) in d.iter().enumerate() {
            let expect = 0.75f64.powi(k as i32);
            assert!((dk - expect).abs() <= 1e-14 * expect, "k={k}");
        }

        let t = run_adaptive(&h, &[1.0], &cfg(0.1, 0.16, 40, 1e-300), 0.0, 1.0).unwrap();
        let kinds = t.step_kinds();
        assert!(kinds[..kinds.len() - 1].iter().all(|&s| s == StepKind::Gradient));
        assert_eq!(t.terminated_by, Termination::Budget);
    }

    #[test]
    fn gd_baselines() {
        let q = PowerLaw::quadratic();
        let t = run_gd(&q, &[1.0], 1.0, &cfg(1.0, 1.0, 10, 1e-12)).unwrap();
        assert_eq!(t.iterations(), 1);
        assert_eq!(t.terminated_by, Termination::StopRule);

        let h = PowerLaw::quartic();
        let t = run_gd(&h, &[1.0], 0.1, &cfg(0.1, 1.0, 10_000, 1e-300)).unwrap();
        let last = t.last().distance.unwrap();
        assert!(last > 1e-3);
        // x_k ~ (0.8 k)^{-1/2}
        assert!((last - (0.8f64 * 1e4).powf(-0.5)).abs() / last < 0.05, "{last}");
    }

    #[test]
    fn gd_divergence_is_reported() {
        let r = run_gd(&ConvexQuartic, &[0.0, 1.0], 10.0, &cfg(10.0, 1.0, 200, 1e-6));
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn polyak_baseline_on_quadratic_halves() {
        let q = PowerLaw::quadratic();
        let t = run_polyak(&q, &[4.0], &cfg(1.0, 1.0, 4, 1e-300)).unwrap();
        let d: Vec<f64> = t.records.iter().map(|r| r.distance.unwrap()).collect();
        assert_eq!(d, vec![4.0, 2.0, 1.0, 0.5, 0.25]);
    }

    #[test]
    fn block_pattern() {
        let h = PowerLaw::quartic();
        let s = BlockSchedule::new(0.1, 2).unwrap();
        let t = run_block_gdpolyak(&h, &[1.0], &s, &cfg(0.1, 1.0, 9, 1e-300)).unwrap();
        use StepKind::*;
        assert_eq!(
            t.step_kinds(),
            vec![Gradient, Gradient, Polyak, Gradient, Gradient, Polyak, Gradient, Gradient, Polyak, None]
        );
        assert!(BlockSchedule::new(1.0, 0).is_err());

        let q = PowerLaw::quadratic();
        let s = BlockSchedule::new(1.0, 1).unwrap();
        let t = run_block_gdpolyak(&q, &[1.0], &s, &cfg(1.0, 1.0, 5, 1e-12)).unwrap();
        assert_eq!(t.iterations(), 1);
    }

    #[test]
    fn zero_gradient_terminates_normally() {
        // X = 0 is a saddle of the scalar single-neuron loss
        let a = crate::linalg::Matrix::from_rows_f64(&[&[1.0]]);
        let n = crate::problems::SingleNeuron::from_parts(a, Vector(vec![1.0]), 1, 0).unwrap();
        let t = run_adaptive(&n, &[0.0], &cfg(1.0, 0.15, 5, 1e-3), 0.0, 1.0).unwrap();
        assert_eq!(t.terminated_by, Termination::ZeroGradient);
        assert_eq!(t.records.len(), 1);
        assert!(t.records[0].ratio_r.is_none());
    }

    #[test]
    fn adaptive_reaches_target_on_convex_quartic() {
        let t = run_adaptive(&ConvexQuartic, &[0.5, 0.5], &cfg(1.0, 0.15, 200, 1e-6), 0.0, 1.0)
            .unwrap();
        assert_eq!(t.terminated_by, Termination::StopRule);
        assert!(t.iterations() <= 200);
        assert!(t.records_are_consecutive());
    }

    #[test]
    fn rejects_bad_inputs() {
        let h = PowerLaw::quartic();
        assert!(matches!(
            run_adaptive(&h, &[1.0, 2.0], &cfg(1.0, 0.1, 5, 1e-3), 0.0, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(run_adaptive(&h, &[1.0], &cfg(1.0, 0.1, 5, 1e-3), 0.0, 1.5).is_err());
        assert!(matches!(
            run_adaptive(&h, &[f64::NAN], &cfg(1.0, 0.1, 5, 1e-3), 0.0, 1.0),
            Err(Error::NonFinite { iteration: 0 })
        ));
    }
}
