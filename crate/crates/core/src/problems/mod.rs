//! Benchmark objectives and a string-keyed registry for them.
//!
//! | id                   | dim   | minimizer       | distance    |
//! |----------------------|-------|-----------------|-------------|
//! | `convex_quartic`     | 2     | `(0, 0)`        | Euclidean   |
//! | `nonconvex_quartic`  | 2     | `(0, 0)`        | Euclidean   |
//! | `quartic_rosenbrock` | 2     | `(1, 1)`        | Euclidean   |
//! | `quadratic_sensing`  | d * k | `[X_star | 0]`  | Procrustes  |
//! | `single_neuron`      | d * k | `[x_star | 0]`  | Procrustes  |
//! | `quartic_1d`         | 1     | `0`             | Euclidean   |
//! | `quadratic_1d`       | 1     | `0`             | Euclidean   |

mod quartics;
mod sensing;

pub use quartics::{ravine_curve, ConvexQuartic, NonconvexQuartic, PowerLaw, QuarticRosenbrock};
pub use sensing::{
    procrustes_distance, NeuronSize, QuadraticSensing, SensingSize, SingleNeuron,
};

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::objective::Objective;
use crate::rng::{gaussian_vector, seeded};
use crate::scalar::Scalar;

/// Scale of the Gaussian initialization used for the factorized problems.
pub const FACTOR_INIT_SCALE: f64 = 0.1;

/// Registered problem together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProblemSpec {
    ConvexQuartic,
    NonconvexQuartic,
    QuarticRosenbrock,
    QuadraticSensing { size: SensingSize, seed: u64 },
    SingleNeuron { size: NeuronSize, seed: u64 },
    Quartic1d,
    Quadratic1d,
}

pub const PROBLEM_IDS: [&str; 7] = [
    "convex_quartic",
    "nonconvex_quartic",
    "quartic_rosenbrock",
    "quadratic_sensing",
    "single_neuron",
    "quartic_1d",
    "quadratic_1d",
];

impl ProblemSpec {
    /// Spec for `id` with default sizes; `seed` feeds the random problems.
    pub fn from_id(id: &str, seed: u64) -> Result<Self> {
        Ok(match id {
            "convex_quartic" => ProblemSpec::ConvexQuartic,
            "nonconvex_quartic" => ProblemSpec::NonconvexQuartic,
            "quartic_rosenbrock" => ProblemSpec::QuarticRosenbrock,
            "quadratic_sensing" => ProblemSpec::QuadraticSensing {
                size: SensingSize::default(),
                seed,
            },
            "single_neuron" => ProblemSpec::SingleNeuron {
                size: NeuronSize::default(),
                seed,
            },
            "quartic_1d" => ProblemSpec::Quartic1d,
            "quadratic_1d" => ProblemSpec::Quadratic1d,
            other => return Err(Error::UnknownProblem(other.to_string())),
        })
    }

    pub fn id(&self) -> &'static str {
        match self {
            ProblemSpec::ConvexQuartic => "convex_quartic",
            ProblemSpec::NonconvexQuartic => "nonconvex_quartic",
            ProblemSpec::QuarticRosenbrock => "quartic_rosenbrock",
            ProblemSpec::QuadraticSensing { .. } => "quadratic_sensing",
            ProblemSpec::SingleNeuron { .. } => "single_neuron",
            ProblemSpec::Quartic1d => "quartic_1d",
            ProblemSpec::Quadratic1d => "quadratic_1d",
        }
    }

    pub fn build<T: Scalar>(&self) -> Result<Box<dyn Objective<T>>> {
        Ok(match *self {
            ProblemSpec::ConvexQuartic => Box::new(ConvexQuartic),
            ProblemSpec::NonconvexQuartic => Box::new(NonconvexQuartic),
            ProblemSpec::QuarticRosenbrock => Box::new(QuarticRosenbrock),
            ProblemSpec::QuadraticSensing { size, seed } => {
                Box::new(QuadraticSensing::<T>::new(size, seed)?)
            }
            ProblemSpec::SingleNeuron { size, seed } => Box::new(SingleNeuron::<T>::new(size, seed)?),
            ProblemSpec::Quartic1d => Box::new(PowerLaw::quartic()),
            ProblemSpec::Quadratic1d => Box::new(PowerLaw::quadratic()),
        })
    }

    /// Documented default initial point. The factorized problems draw
    /// `0.1 * N(0, I)` from a ChaCha8 stream seeded with `seed` (independent
    /// of the stream that generated the problem data).
    pub fn default_x0<T: Scalar>(&self, seed: u64) -> Vector<T> {
        match *self {
            ProblemSpec::ConvexQuartic | ProblemSpec::NonconvexQuartic => {
                Vector::from_f64(&[0.5, 0.5])
            }
            ProblemSpec::QuarticRosenbrock => Vector::from_f64(&[-1.0, 1.0]),
            ProblemSpec::QuadraticSensing { size, .. } => {
                factor_init(size.d * size.k, seed)
            }
            ProblemSpec::SingleNeuron { size, .. } => factor_init(size.d * size.k, seed),
            ProblemSpec::Quartic1d | ProblemSpec::Quadratic1d => Vector::from_f64(&[1.0]),
        }
    }
}

fn factor_init<T: Scalar>(n: usize, seed: u64) -> Vector<T> {
    let mut rng = seeded(seed ^ 0x9E37_79B9_7F4A_7C15);
    let z: Vector<T> = gaussian_vector(&mut rng, n);
    z.scale(T::lit(FACTOR_INIT_SCALE))
}
