//! Experiment descriptions and their resolution against per-problem defaults.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use qd_core::problems::ProblemSpec;
use qd_core::rng::{in_ball, seeded};
use qd_core::{StopKind, StopRule64, Vector64};

/// Stream offset for random initial points, so they never share a draw with the instance.
const X0_STREAM: u64 = 0x51_7cc1_b727_220a;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algo {
    Adaptive,
    Gd,
    Polyak,
    Block,
    Wrapper,
}

impl Algo {
    pub const ALL: [Algo; 5] = [Algo::Adaptive, Algo::Gd, Algo::Polyak, Algo::Block, Algo::Wrapper];

    pub fn as_str(self) -> &'static str {
        match self {
            Algo::Adaptive => "adaptive",
            Algo::Gd => "gd",
            Algo::Polyak => "polyak",
            Algo::Block => "block",
            Algo::Wrapper => "wrapper",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algo {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> anyhow::Result<Self> {
        Algo::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .with_context(|| format!("unknown algorithm `{s}` (expected adaptive, gd, polyak, block or wrapper)"))
    }
}

/// How the initial point is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum X0Spec {
    /// The problem's documented default.
    Preset,
    Explicit(Vec<f64>),
    /// Uniform in the ball of this radius around the origin, drawn from the seed.
    Random { radius: f64 },
}

impl FromStr for X0Spec {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> anyhow::Result<Self> {
        let s = s.trim();
        if s == "preset" || s == "default" {
            return Ok(X0Spec::Preset);
        }
        if let Some(r) = s.strip_prefix("random:") {
            let radius: f64 = r.parse().with_context(|| format!("bad radius in `{s}`"))?;
            if !(radius > 0.0) {
                bail!("random x0 radius must be positive");
            }
            return Ok(X0Spec::Random { radius });
        }
        let xs = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("x0 `{s}` is neither `preset`, `random:<radius>` nor a comma-separated vector"))?;
        if xs.iter().any(|x| !x.is_finite()) {
            bail!("x0 entries must be finite");
        }
        Ok(X0Spec::Explicit(xs))
    }
}

/// Overrides for the randomly generated factor problems.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SizeOverrides {
    pub dim: Option<usize>,
    pub rank: Option<usize>,
    pub search_rank: Option<usize>,
    pub samples: Option<usize>,
}

/// Hyperparameters and stop rule used when a spec leaves them open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemDefaults {
    pub eta: f64,
    pub tau: f64,
    pub block_stepsize: f64,
    pub block_len: usize,
    pub gd_stepsize: f64,
    pub stop_kind: StopKind,
    pub stop_threshold: f64,
    pub max_iters: usize,
}

/// Figure-3 settings for the two quartics and Figure-4 settings for the benchmarks.
pub fn problem_defaults(problem: &str) -> anyhow::Result<ProblemDefaults> {
    use StopKind::*;
    let d = |eta, tau, block_stepsize, block_len, gd_stepsize, stop_kind, stop_threshold, max_iters| ProblemDefaults {
        eta,
        tau,
        block_stepsize,
        block_len,
        gd_stepsize,
        stop_kind,
        stop_threshold,
        max_iters,
    };
    Ok(match problem {
        "convex_quartic" => d(1.0, 0.15, 1.0, 1, 1.0, Distance, 1e-6, 300),
        "nonconvex_quartic" => d(1.0, 0.12, 1.0, 1, 1.0, Distance, 1e-6, 300),
        "quartic_rosenbrock" => d(0.05, 0.01, 0.03, 50, 0.03, Distance, 1e-7, 5000),
        "quadratic_sensing" => d(0.075, 0.15, 0.075, 200, 0.075, Distance, 1e-5, 20_000),
        "single_neuron" => d(1.0, 0.0125, 1.0, 10, 1.5, ValueGap, 1e-12, 2000),
        "quartic_1d" => d(0.1, 0.15, 0.1, 1, 0.1, Distance, 1e-8, 1000),
        "quadratic_1d" => d(1.0, 0.15, 1.0, 1, 1.0, Distance, 1e-8, 1000),
        other => bail!("unknown problem `{other}`"),
    })
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub problem: String,
    pub size: SizeOverrides,
    pub algo: Algo,
    pub eta: f64,
    pub tau: f64,
    /// GD stepsize for `gd`, and the gradient stepsize inside `block`.
    pub stepsize: f64,
    pub block_len: usize,
    /// Initial lower bound for `wrapper`.
    pub h0: f64,
    pub outer_epochs: usize,
    pub x0: X0Spec,
    pub seed: u64,
    pub stop_kind: StopKind,
    pub stop_threshold: f64,
    pub max_iters: usize,
    /// Log `G(x) = ||P grad f(x)||^2` with `P` from the Hessian at the minimizer.
    pub record_g: bool,
}

impl ExperimentSpec {
    /// Spec with every open field taken from [`problem_defaults`].
    pub fn with_defaults(problem: &str, algo: Algo, seed: u64) -> anyhow::Result<Self> {
        let d = problem_defaults(problem)?;
        let stepsize = match algo {
            Algo::Block => d.block_stepsize,
            _ => d.gd_stepsize,
        };
        Ok(ExperimentSpec {
            problem: problem.to_string(),
            size: SizeOverrides::default(),
            algo,
            eta: d.eta,
            tau: d.tau,
            stepsize,
            block_len: d.block_len,
            h0: 0.0,
            outer_epochs: 10,
            x0: X0Spec::Preset,
            seed,
            stop_kind: d.stop_kind,
            stop_threshold: d.stop_threshold,
            max_iters: d.max_iters,
            record_g: false,
        })
    }

    pub fn problem_spec(&self) -> anyhow::Result<ProblemSpec> {
        let mut p = ProblemSpec::from_id(&self.problem, self.seed)?;
        let o = self.size;
        match &mut p {
            ProblemSpec::QuadraticSensing { size, .. } => {
                size.d = o.dim.unwrap_or(size.d);
                size.r = o.rank.unwrap_or(size.r);
                size.k = o.search_rank.unwrap_or(size.k);
                size.m = o.samples.unwrap_or(size.m);
            }
            ProblemSpec::SingleNeuron { size, .. } => {
                if o.rank.is_some() {
                    bail!("single_neuron has no rank parameter");
                }
                size.d = o.dim.unwrap_or(size.d);
                size.k = o.search_rank.unwrap_or(size.k);
                size.m = o.samples.unwrap_or(size.m);
            }
            _ => {
                if o != SizeOverrides::default() {
                    bail!("problem `{}` has no size parameters", self.problem);
                }
            }
        }
        Ok(p)
    }

    pub fn stop_rule(&self) -> anyhow::Result<StopRule64> {
        Ok(StopRule64::new(self.stop_kind, self.stop_threshold)?)
    }

    pub fn initial_point(&self, problem: &ProblemSpec, dim: usize) -> anyhow::Result<Vector64> {
        let x0 = match &self.x0 {
            X0Spec::Preset => problem.default_x0(self.seed),
            X0Spec::Explicit(xs) => Vector64::from_f64(xs),
            X0Spec::Random { radius } => in_ball(&mut seeded(self.seed ^ X0_STREAM), dim, *radius),
        };
        if x0.len() != dim {
            bail!("x0 has {} entries but `{}` has dimension {dim}", x0.len(), self.problem);
        }
        Ok(x0)
    }
}

/// Optional fields shared by the config file and the command line; set fields
/// override the defaults, and command-line values override the file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecOverrides {
    pub problem: Option<String>,
    pub algo: Option<String>,
    pub eta: Option<f64>,
    pub tau: Option<f64>,
    pub stepsize: Option<f64>,
    pub block_len: Option<usize>,
    pub h0: Option<f64>,
    pub outer_epochs: Option<usize>,
    pub x0: Option<String>,
    pub seed: Option<u64>,
    pub stop_kind: Option<String>,
    pub stop_threshold: Option<f64>,
    pub max_iters: Option<usize>,
    pub record_g: Option<bool>,
    pub dim: Option<usize>,
    pub rank: Option<usize>,
    pub search_rank: Option<usize>,
    pub samples: Option<usize>,
}

macro_rules! merge_fields {
    ($hi:ident, $lo:ident, $($f:ident),*) => {
        SpecOverrides { $($f: $hi.$f.or($lo.$f)),* }
    };
}

impl SpecOverrides {
    /// Reads `key = value` lines (TOML syntax).
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Fields of `self` win over `lower`.
    pub fn over(self, lower: SpecOverrides) -> SpecOverrides {
        merge_fields!(
            self, lower, problem, algo, eta, tau, stepsize, block_len, h0, outer_epochs, x0, seed, stop_kind,
            stop_threshold, max_iters, record_g, dim, rank, search_rank, samples
        )
    }

    pub fn resolve(&self, default_seed: u64) -> anyhow::Result<ExperimentSpec> {
        let problem = self.problem.as_deref().context("no problem given (--problem or `problem = ...`)")?;
        let algo: Algo = self.algo.as_deref().unwrap_or("adaptive").parse()?;
        let mut s = ExperimentSpec::with_defaults(problem, algo, self.seed.unwrap_or(default_seed))?;
        if let Some(v) = self.eta {
            s.eta = v;
            if algo == Algo::Gd && self.stepsize.is_none() {
                s.stepsize = v;
            }
        }
        s.tau = self.tau.unwrap_or(s.tau);
        s.stepsize = self.stepsize.unwrap_or(s.stepsize);
        s.block_len = self.block_len.unwrap_or(s.block_len);
        s.h0 = self.h0.unwrap_or(s.h0);
        s.outer_epochs = self.outer_epochs.unwrap_or(s.outer_epochs);
        if let Some(x0) = &self.x0 {
            s.x0 = x0.parse()?;
        }
        if let Some(k) = &self.stop_kind {
            s.stop_kind = k.parse().map_err(|e| anyhow::anyhow!("{e}"))?;
            if self.stop_threshold.is_none() {
                bail!("--stop-kind needs --stop-threshold");
            }
        }
        s.stop_threshold = self.stop_threshold.unwrap_or(s.stop_threshold);
        s.max_iters = self.max_iters.unwrap_or(s.max_iters);
        s.record_g = self.record_g.unwrap_or(s.record_g);
        s.size = SizeOverrides {
            dim: self.dim,
            rank: self.rank,
            search_rank: self.search_rank,
            samples: self.samples,
        };
        s.problem_spec()?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x0_forms() {
        assert_eq!("preset".parse::<X0Spec>().unwrap(), X0Spec::Preset);
        assert_eq!("0.5, -1".parse::<X0Spec>().unwrap(), X0Spec::Explicit(vec![0.5, -1.0]));
        assert_eq!("random:0.3".parse::<X0Spec>().unwrap(), X0Spec::Random { radius: 0.3 });
        assert!("random:-1".parse::<X0Spec>().is_err());
        assert!("a,b".parse::<X0Spec>().is_err());
    }

    #[test]
    fn flags_override_file() {
        let file: SpecOverrides = toml::from_str("problem = \"convex_quartic\"\neta = 0.5\ntau = 0.1\n").unwrap();
        let flags = SpecOverrides {
            eta: Some(0.25),
            ..Default::default()
        };
        let s = flags.over(file).resolve(3).unwrap();
        assert_eq!((s.eta, s.tau, s.seed), (0.25, 0.1, 3));
        assert_eq!(s.stop_threshold, 1e-6);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<SpecOverrides>("etaa = 1.0").is_err());
    }

    #[test]
    fn initial_points() {
        let s = ExperimentSpec::with_defaults("convex_quartic", Algo::Adaptive, 0).unwrap();
        let p = s.problem_spec().unwrap();
        assert_eq!(s.initial_point(&p, 2).unwrap().0, vec![0.5, 0.5]);
        let mut r = s.clone();
        r.x0 = X0Spec::Random { radius: 0.1 };
        let x = r.initial_point(&p, 2).unwrap();
        assert!(x.norm() <= 0.1);
        assert_eq!(x, r.initial_point(&p, 2).unwrap());
        let mut e = s;
        e.x0 = X0Spec::Explicit(vec![1.0]);
        assert!(e.initial_point(&p, 2).is_err());
    }

    #[test]
    fn size_overrides_only_for_factor_problems() {
        let mut s = ExperimentSpec::with_defaults("quadratic_sensing", Algo::Adaptive, 7).unwrap();
        s.size.search_rank = Some(2);
        match s.problem_spec().unwrap() {
            ProblemSpec::QuadraticSensing { size, .. } => assert_eq!(size.k, 2),
            other => panic!("{other:?}"),
        }
        let mut q = ExperimentSpec::with_defaults("convex_quartic", Algo::Adaptive, 7).unwrap();
        q.size.dim = Some(3);
        assert!(q.problem_spec().is_err());
    }
}
