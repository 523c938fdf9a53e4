use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::run::{RunConfig, RunTrace, Termination};
use crate::scalar::Scalar;

use super::drivers::run_adaptive_epoch;
#[cfg(test)]
use super::drivers::run_adaptive;

/// Optimal-value estimate carried between outer epochs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundState<T> {
    /// Estimate used by the next epoch.
    pub h_hat: T,
    pub epoch: usize,
    /// Smallest value observed during `epoch` (the starting value for epoch 0).
    pub best_value: T,
}

#[derive(Debug, Clone)]
pub struct WrapperOutcome<T> {
    pub traces: Vec<RunTrace<T>>,
    /// `states[0]` holds `h0`; `states[j]` the estimate after epoch `j`.
    pub states: Vec<LowerBoundState<T>>,
}

impl<T: Scalar> WrapperOutcome<T> {
    pub fn reached_stop(&self) -> bool {
        self.traces.last().is_some_and(|t| t.reached_stop())
    }

    pub fn total_iterations(&self) -> usize {
        self.traces.iter().map(|t| t.iterations()).sum()
    }
}

/// Runs the adaptive method against a lower bound `h0 <= f*` instead of the
/// optimal value. Epoch `j` uses `h_j` in both the trigger and a half-length
/// Polyak step, then sets `h_{j+1} = (h_j + min_k f(x_k)) / 2` and warm-starts
/// from the best iterate. Stops early once an epoch meets the stop rule.
///
/// With `h_j < f*` the Polyak step overshoots wherever `||grad f||` is small
/// compared to the gap; an epoch that is thrown out of the finite region
/// ends there, keeping what it observed.
pub fn run_lower_bound_wrapper<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    x0: &[T],
    cfg: &RunConfig<T>,
    h0: T,
    outer_epochs: usize,
) -> Result<WrapperOutcome<T>> {
    if outer_epochs == 0 {
        return Err(Error::InvalidConfig("outer_epochs must be at least 1".into()));
    }
    let half = T::lit(0.5);
    let mut states = vec![LowerBoundState {
        h_hat: h0,
        epoch: 0,
        best_value: obj.value(x0),
    }];
    let mut traces = Vec::with_capacity(outer_epochs);
    let mut x = x0.to_vec();
    let mut h_hat = h0;

    for epoch in 1..=outer_epochs {
        let trace = run_adaptive_epoch(obj, &x, cfg, h_hat, half).map_err(|e| match e {
            Error::NegativeGap { value, floor } => Error::InvalidLowerBound {
                value,
                h_hat: floor,
                epoch,
            },
            other => other,
        })?;
        let best = trace.best_value();
        h_hat = half * (h_hat + best);
        states.push(LowerBoundState {
            h_hat,
            epoch,
            best_value: best,
        });
        x = trace.best_point.0.clone();
        let done = matches!(
            trace.terminated_by,
            Termination::StopRule | Termination::ZeroGradient
        );
        traces.push(trace);
        if done {
            break;
        }
    }
    Ok(WrapperOutcome { traces, states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::PowerLaw;
    use crate::run::StopRule;

    #[test]
    fn exact_lower_bound_reduces_to_half_scaled_adaptive() {
        let h = PowerLaw::quartic();
        let cfg = RunConfig::new(0.1, 0.15, 50, StopRule::distance(1e-300)).unwrap();
        let out = run_lower_bound_wrapper(&h, &[1.0], &cfg, 0.0, 1).unwrap();
        let direct = run_adaptive(&h, &[1.0], &cfg, 0.0, 0.5).unwrap();
        assert_eq!(out.traces[0].records, direct.records);
        assert_eq!(out.states[1].h_hat, 0.5 * direct.best_value());
    }

    #[test]
    fn estimates_are_nondecreasing() {
        let h = PowerLaw::quartic();
        let cfg = RunConfig::new(0.1, 0.15, 100, StopRule::distance(1e-300)).unwrap();
        let out = run_lower_bound_wrapper(&h, &[1.0], &cfg, -1.0, 10).unwrap();
        assert!(out.states.windows(2).all(|w| w[1].h_hat >= w[0].h_hat));
        assert!(out.states.iter().all(|s| s.h_hat <= 0.0));
    }

    #[test]
    fn estimate_above_optimum_is_rejected() {
        let h = PowerLaw::quartic();
        let cfg = RunConfig::new(0.1, 0.15, 200, StopRule::distance(1e-300)).unwrap();
        let r = run_lower_bound_wrapper(&h, &[1.0], &cfg, 0.5, 3);
        assert!(matches!(r, Err(Error::InvalidLowerBound { epoch: 1, .. })), "{r:?}");
    }
}
