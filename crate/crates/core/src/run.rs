//! Run configuration, stop rules and per-iteration traces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::objective::default_grad_zero_tol;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopKind {
    Distance,
    GradientNorm,
    ValueGap,
}

impl StopKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StopKind::Distance => "distance",
            StopKind::GradientNorm => "gradient_norm",
            StopKind::ValueGap => "value_gap",
        }
    }
}

impl std::str::FromStr for StopKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distance" => Ok(StopKind::Distance),
            "gradient_norm" | "grad_norm" => Ok(StopKind::GradientNorm),
            "value_gap" | "gap" => Ok(StopKind::ValueGap),
            other => Err(Error::InvalidConfig(format!("unknown stop kind `{other}`"))),
        }
    }
}

/// Stop once the chosen diagnostic is at or below `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopRule<T> {
    pub kind: StopKind,
    pub threshold: T,
}

impl<T: Scalar> StopRule<T> {
    pub fn new(kind: StopKind, threshold: T) -> Result<Self> {
        if !(threshold > T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "stop threshold must be positive, got {threshold}"
            )));
        }
        Ok(StopRule { kind, threshold })
    }

    pub fn distance(threshold: T) -> Self {
        Self::new(StopKind::Distance, threshold).expect("positive threshold")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig<T> {
    pub eta: T,
    pub tau: T,
    pub max_iters: usize,
    pub stop: StopRule<T>,
    pub grad_zero_tol: T,
    /// Projector onto the Hessian range; when present `G(x) = ||P grad f(x)||^2` is logged.
    #[serde(skip)]
    pub g_projector: Option<Matrix<T>>,
    /// Keep every iterate in the trace.
    #[serde(skip)]
    pub keep_iterates: bool,
}

impl<T: Scalar> RunConfig<T> {
    pub fn new(eta: T, tau: T, max_iters: usize, stop: StopRule<T>) -> Result<Self> {
        let cfg = RunConfig {
            eta,
            tau,
            max_iters,
            stop,
            grad_zero_tol: default_grad_zero_tol(),
            g_projector: None,
            keep_iterates: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > T::zero()) {
            return Err(Error::InvalidConfig(format!("eta must be positive, got {}", self.eta)));
        }
        if !(self.tau > T::zero()) {
            return Err(Error::InvalidConfig(format!("tau must be positive, got {}", self.tau)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.stop.threshold > T::zero()) {
            return Err(Error::InvalidConfig("stop threshold must be positive".into()));
        }
        if self.grad_zero_tol < T::zero() {
            return Err(Error::InvalidConfig("grad_zero_tol must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn with_projector(mut self, projector: Matrix<T>) -> Self {
        self.g_projector = Some(projector);
        self
    }

    pub fn with_iterates(mut self) -> Self {
        self.keep_iterates = true;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn record_g(&self) -> bool {
        self.g_projector.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Gradient,
    Polyak,
    /// Terminal record: no step was taken from this point.
    None,
}

impl StepKind {
    /// Token used in trace CSVs; the terminal record has an empty cell.
    pub fn csv_token(self) -> &'static str {
        match self {
            StepKind::Gradient => "gd",
            StepKind::Polyak => "polyak",
            StepKind::None => "",
        }
    }
}

/// State at `x_k` together with the step taken from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterRecord<T> {
    pub k: usize,
    pub f_val: T,
    pub grad_norm: T,
    /// `None` when the gradient is numerically zero.
    pub ratio_r: Option<T>,
    pub step_kind: StepKind,
    pub distance: Option<T>,
    pub proj_grad_sq: Option<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    StopRule,
    Budget,
    ZeroGradient,
    /// A wrapper epoch left the finite region; the last record is the final finite iterate.
    Diverged,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::StopRule => "stop_rule",
            Termination::Budget => "budget",
            Termination::ZeroGradient => "zero_gradient",
            Termination::Diverged => "diverged",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace<T> {
    pub records: Vec<IterRecord<T>>,
    pub config: RunConfig<T>,
    pub problem_name: String,
    pub seed: u64,
    pub terminated_by: Termination,
    pub optimal_value: T,
    pub final_point: Vector<T>,
    /// Iterate with the smallest observed value.
    pub best_point: Vector<T>,
    #[serde(skip)]
    pub iterates: Option<Vec<Vector<T>>>,
}

impl<T: Scalar> RunTrace<T> {
    /// Number of steps taken.
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.k)
    }

    pub fn last(&self) -> &IterRecord<T> {
        self.records.last().expect("trace has at least one record")
    }

    pub fn reached_stop(&self) -> bool {
        self.terminated_by == Termination::StopRule
    }

    /// Value of the stop diagnostic at the last record.
    pub fn final_diagnostic(&self) -> Option<T> {
        let last = self.last();
        match self.config.stop.kind {
            StopKind::Distance => last.distance,
            StopKind::GradientNorm => Some(last.grad_norm),
            StopKind::ValueGap => Some(last.f_val - self.optimal_value),
        }
    }

    /// First iteration index whose distance is at or below `eps`.
    pub fn first_within_distance(&self, eps: T) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.distance.is_some_and(|d| d <= eps))
            .map(|r| r.k)
    }

    pub fn step_kinds(&self) -> Vec<StepKind> {
        self.records.iter().map(|r| r.step_kind).collect()
    }

    pub fn best_value(&self) -> T {
        self.records
            .iter()
            .map(|r| r.f_val)
            .fold(T::infinity(), |a, b| a.min(b))
    }

    pub fn records_are_consecutive(&self) -> bool {
        self.records.iter().enumerate().all(|(i, r)| r.k == i)
    }
}
