//! Gradient descent with an adaptive switch to Polyak steps for objectives
//! with quartic growth and singular Hessians, with baselines, benchmark
//! problems, and finite-difference verification of the local structure
//! (range/null splitting, vanishing cubic terms, per-step contractions).
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the double-precision instantiation used by the harness.

pub mod algorithms;
pub mod analysis;
mod error;
pub mod linalg;
pub mod objective;
pub mod problems;
pub mod rng;
pub mod run;
mod scalar;

pub use error::{Error, Result};
pub use linalg::{euclid_distance, Matrix, Vector};
pub use objective::{ratio_r, Objective};
pub use run::{IterRecord, RunConfig, RunTrace, StepKind, StopKind, StopRule, Termination};
pub use scalar::Scalar;

pub type Vector64 = Vector<f64>;
pub type Matrix64 = Matrix<f64>;
pub type RunConfig64 = RunConfig<f64>;
pub type RunTrace64 = RunTrace<f64>;
pub type IterRecord64 = IterRecord<f64>;
pub type StopRule64 = StopRule<f64>;
pub type HessianSplit64 = analysis::HessianSplit<f64>;
pub type BlockSchedule64 = algorithms::BlockSchedule<f64>;
pub type LowerBoundState64 = algorithms::LowerBoundState<f64>;
pub type QuadraticSensing64 = problems::QuadraticSensing<f64>;
pub type SingleNeuron64 = problems::SingleNeuron<f64>;

pub type Vector32 = Vector<f32>;
pub type RunConfig32 = RunConfig<f32>;
pub type RunTrace32 = RunTrace<f32>;
