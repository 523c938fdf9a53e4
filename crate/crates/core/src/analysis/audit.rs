//! Runtime checks of the per-step guarantees along recorded traces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::norm_sq;
use crate::objective::Objective;
use crate::run::{RunTrace, StepKind};
use crate::scalar::Scalar;

use super::split::HessianSplit;

/// Squared projected gradient `G(x) = ||P grad f(x)||^2`.
pub fn proj_grad_sq<T: Scalar, O: Objective<T> + ?Sized>(obj: &O, split: &HessianSplit<T>, x: &[T]) -> T {
    norm_sq(&split.project_range(&obj.gradient(x)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionAudit {
    /// `(k, G(x_{k+1}) / G(x_k))` for every gradient step with `G(x_k) > 0`.
    pub ratios: Vec<(usize, f64)>,
    pub median: Option<f64>,
    pub p90: Option<f64>,
    pub max: Option<f64>,
}

impl ContractionAudit {
    pub fn fraction_at_most(&self, bound: f64) -> f64 {
        if self.ratios.is_empty() {
            return 1.0;
        }
        let n = self.ratios.iter().filter(|(_, r)| *r <= bound).count();
        n as f64 / self.ratios.len() as f64
    }
}

fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    Some(sorted[idx])
}

/// Per-gradient-step contraction ratios of the recorded `G` column.
pub fn contraction_audit<T: Scalar>(trace: &RunTrace<T>) -> Result<ContractionAudit> {
    if trace.records.iter().any(|r| r.proj_grad_sq.is_none()) {
        return Err(Error::MissingG);
    }
    let ratios: Vec<(usize, f64)> = trace
        .records
        .windows(2)
        .filter(|w| w[0].step_kind == StepKind::Gradient)
        .filter_map(|w| {
            let g0 = w[0].proj_grad_sq?.to_f64_lossy();
            let g1 = w[1].proj_grad_sq?.to_f64_lossy();
            (g0 > 0.0).then(|| (w[0].k, g1 / g0))
        })
        .collect();
    let mut sorted: Vec<f64> = ratios.iter().map(|&(_, r)| r).collect();
    sorted.sort_by(|a, b| a.total_cmp(b));
    Ok(ContractionAudit {
        median: quantile(&sorted, 0.5),
        p90: quantile(&sorted, 0.9),
        max: sorted.last().copied(),
        ratios,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCheck {
    pub checked_steps: usize,
    pub violations: Vec<usize>,
    /// Largest violation margin (positive means violated).
    pub worst_margin: f64,
}

impl StepCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn distances<T: Scalar>(trace: &RunTrace<T>) -> Result<Vec<f64>> {
    trace
        .records
        .iter()
        .map(|r| r.distance.map(|d| d.to_f64_lossy()).ok_or(Error::NoMinimizer))
        .collect()
}

/// `dist_{k+1} <= dist_k (1 + rel_slack)` for every step.
pub fn check_distance_monotone<T: Scalar>(trace: &RunTrace<T>, rel_slack: f64) -> Result<StepCheck> {
    let d = distances(trace)?;
    let mut check = StepCheck {
        checked_steps: d.len().saturating_sub(1),
        violations: vec![],
        worst_margin: f64::NEG_INFINITY,
    };
    for (k, w) in d.windows(2).enumerate() {
        let margin = w[1] - w[0] * (1.0 + rel_slack);
        check.worst_margin = check.worst_margin.max(margin);
        if margin > 0.0 {
            check.violations.push(k);
        }
    }
    Ok(check)
}

/// On every Polyak step, `dist_{k+1}^2 <= (1 - tau^{3/2} sqrt(m0)) dist_k^2 + abs_slack`.
pub fn check_polyak_contraction<T: Scalar>(
    trace: &RunTrace<T>,
    tau: f64,
    m0: f64,
    abs_slack: f64,
) -> Result<StepCheck> {
    let d = distances(trace)?;
    let c = tau.powf(1.5) * m0.sqrt();
    let mut check = StepCheck {
        checked_steps: 0,
        violations: vec![],
        worst_margin: f64::NEG_INFINITY,
    };
    for (k, rec) in trace.records.iter().enumerate() {
        if rec.step_kind != StepKind::Polyak || k + 1 >= d.len() {
            continue;
        }
        check.checked_steps += 1;
        let margin = d[k + 1] * d[k + 1] - (d[k] * d[k] - c * d[k] * d[k] + abs_slack);
        check.worst_margin = check.worst_margin.max(margin);
        if margin > 0.0 {
            check.violations.push(k);
        }
    }
    Ok(check)
}

/// `f(x_{k+1}) <= f(x_k) + abs_slack` on every gradient step.
pub fn check_gd_descent<T: Scalar>(trace: &RunTrace<T>, abs_slack: f64) -> StepCheck {
    let mut check = StepCheck {
        checked_steps: 0,
        violations: vec![],
        worst_margin: f64::NEG_INFINITY,
    };
    for w in trace.records.windows(2) {
        if w[0].step_kind != StepKind::Gradient {
            continue;
        }
        check.checked_steps += 1;
        let margin = (w[1].f_val - w[0].f_val).to_f64_lossy() - abs_slack;
        check.worst_margin = check.worst_margin.max(margin);
        if margin > 0.0 {
            check.violations.push(w[0].k);
        }
    }
    check
}
