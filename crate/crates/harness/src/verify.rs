//! Verification suite: derivative checks, Hessian splitting, cubic
//! couplings, growth, and per-step audits along a reference run.

use serde::Serialize;
use serde_json::{json, Value};

use qd_core::algorithms::run_adaptive;
use qd_core::analysis::{
    check_distance_monotone, check_polyak_contraction, check_vanishing_cubics, contraction_audit, fd_hessian,
    gradient_check, growth_estimate, proj_grad_sq, FD_GRADIENT_STEP, FD_HESSIAN_STEP, FD_THIRD_STEP,
};
use qd_core::problems::{ravine_curve, ProblemSpec};
use qd_core::rng::{in_ball, seeded};
use qd_core::{Objective, RunConfig64, StopRule64, Vector64};

use crate::runner::minimizer_split;
use crate::spec::{problem_defaults, ExperimentSpec};

pub const GRADIENT_TOL: f64 = 1e-6;
pub const HESSIAN_TOL: f64 = 1e-5;
pub const PROJECTOR_TOL: f64 = 1e-10;
pub const CUBIC_TOL: f64 = 1e-4;
pub const CUBIC_SAMPLES: usize = 32;
pub const GROWTH_RADIUS: f64 = 0.5;
pub const GROWTH_SAMPLES: usize = 10_000;
pub const STEP_SLACK: f64 = 1e-12;
pub const G_RATIO_BOUND: f64 = 0.99;
pub const G_RATIO_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Failure predicted by the theory for this problem.
    ExpectedFail,
    /// Recorded, but the problem is outside the hypotheses the check relies on.
    Info,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub problem: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Problems where the local convexity hypothesis holds, so distance
/// monotonicity and the Polyak contraction are guaranteed.
fn locally_convex(problem: &str) -> bool {
    matches!(problem, "convex_quartic" | "quartic_1d" | "quadratic_1d")
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// `Fail` becomes `Info` outside the hypotheses.
fn soften(s: Status, applies: bool) -> Status {
    if s == Status::Fail && !applies {
        Status::Info
    } else {
        s
    }
}

pub fn verify(problem_id: &str, seed: u64) -> anyhow::Result<VerifyReport> {
    let spec = ProblemSpec::from_id(problem_id, seed)?;
    let obj = spec.build::<f64>()?;
    let obj: &dyn Objective<f64> = obj.as_ref();
    let d = obj.dim();
    let convex = locally_convex(problem_id);
    let mut checks = Vec::new();

    let mut rng = seeded(seed ^ 0xfd);
    let points: Vec<Vector64> = (0..10).map(|_| in_ball(&mut rng, d, 1.0)).collect();
    let g = gradient_check(obj, &points, FD_GRADIENT_STEP, GRADIENT_TOL);
    checks.push(Check {
        name: "gradient_fd",
        status: status(g.passed),
        detail: json!(g),
    });

    checks.push(if obj.hessian(&points[0]).is_some() {
        let err = points
            .iter()
            .take(3)
            .map(|x| {
                let exact = obj.hessian(x).expect("analytic Hessian");
                exact.sub(&fd_hessian(obj, x, FD_HESSIAN_STEP)).max_abs() / exact.max_abs().max(1.0)
            })
            .fold(0.0, f64::max);
        Check {
            name: "hessian_fd",
            status: status(err <= HESSIAN_TOL),
            detail: json!({ "max_rel_err": err, "tolerance": HESSIAN_TOL, "points": 3 }),
        }
    } else {
        Check {
            name: "hessian_fd",
            status: Status::Skipped,
            detail: json!({ "reason": "no analytic Hessian" }),
        }
    });

    let xstar = obj.minimizer();
    let split = minimizer_split(obj).ok();
    match (&xstar, &split) {
        (Some(xs), Some(s)) => {
            let defect = s.projector_defect();
            let fd = fd_hessian(obj, xs, FD_HESSIAN_STEP);
            checks.push(Check {
                name: "projector_algebra",
                status: status(defect <= PROJECTOR_TOL),
                detail: json!({
                    "defect": defect,
                    "tolerance": PROJECTOR_TOL,
                    "eigenvalues": s.eigvals,
                    "null_dim": s.null_dim(),
                    "mu": s.mu,
                    "warning": s.warning,
                    "fd_hessian_at_minimizer": fd.as_slice(),
                }),
            });
            checks.push(if s.null_dim() == 0 {
                Check {
                    name: "vanishing_cubics",
                    status: Status::Skipped,
                    detail: json!({ "reason": "Hessian at the minimizer is nonsingular" }),
                }
            } else {
                let r = check_vanishing_cubics(obj, xs, s, CUBIC_SAMPLES, FD_THIRD_STEP, CUBIC_TOL, seed)?;
                let st = match (r.passed, problem_id) {
                    (false, "nonconvex_quartic") => Status::ExpectedFail,
                    (ok, _) => soften(status(ok), convex),
                };
                Check {
                    name: "vanishing_cubics",
                    status: st,
                    detail: json!(r),
                }
            });
        }
        _ => checks.push(Check {
            name: "projector_algebra",
            status: Status::Skipped,
            detail: json!({ "reason": "no reference minimizer" }),
        }),
    }

    let m0 = match growth_estimate(obj, GROWTH_RADIUS, GROWTH_SAMPLES, seed) {
        Ok((m0, worst)) => {
            checks.push(Check {
                name: "growth",
                status: soften(status(m0 > 0.0 && m0.is_finite()), convex),
                detail: json!({ "m0_hat": m0, "worst_x": worst, "radius": GROWTH_RADIUS, "samples": GROWTH_SAMPLES }),
            });
            Some(m0)
        }
        Err(e) => {
            checks.push(Check {
                name: "growth",
                status: Status::Fail,
                detail: json!({ "error": e.to_string() }),
            });
            None
        }
    };

    if let (Ok(ravine), Some(s)) = (
        ravine_curve(problem_id, &(0..20).map(|i| -0.5 + i as f64 / 19.0).collect::<Vec<_>>()),
        &split,
    ) {
        let gs: Vec<f64> = ravine.iter().map(|&(v, u)| proj_grad_sq(obj, s, &[v, u])).collect();
        checks.push(Check {
            name: "ravine_g_zero",
            status: status(gs.iter().all(|&g| g == 0.0)),
            detail: json!({ "max_g": gs.iter().fold(0.0f64, |a, &b| a.max(b)), "points": gs.len() }),
        });
    }

    // reference run with the problem's own hyperparameters from its preset start
    let defaults = problem_defaults(problem_id)?;
    let refspec = ExperimentSpec::with_defaults(problem_id, crate::spec::Algo::Adaptive, seed)?;
    let x0 = refspec.initial_point(&spec, d)?;
    let stop = StopRule64::new(defaults.stop_kind, defaults.stop_threshold)?;
    let cfg = RunConfig64::new(defaults.eta, defaults.tau, defaults.max_iters, stop)?;
    match run_adaptive(obj, &x0, &cfg, obj.optimal_value(), 1.0) {
        Ok(t) => {
            let mono = check_distance_monotone(&t, STEP_SLACK)?;
            checks.push(Check {
                name: "distance_monotone",
                status: soften(status(mono.passed()), convex),
                detail: json!({ "run_iterations": t.iterations(), "check": mono }),
            });
            if let Some(m0) = m0 {
                let c = check_polyak_contraction(&t, defaults.tau, m0, STEP_SLACK)?;
                checks.push(Check {
                    name: "polyak_contraction",
                    status: soften(status(c.passed()), convex),
                    detail: json!({ "tau": defaults.tau, "m0_hat": m0, "check": c }),
                });
            }
        }
        Err(e) => checks.push(Check {
            name: "distance_monotone",
            status: soften(Status::Fail, convex),
            detail: json!({ "error": e.to_string() }),
        }),
    }

    if let Some(s) = &split {
        // gradient phase at a smaller stepsize, where G contracts linearly
        let (eta, x0) = if d == 2 && xstar.as_ref().is_some_and(|x| x.norm() == 0.0) {
            (0.1, Vector64::from_f64(&[0.3, 0.3]))
        } else {
            (defaults.eta, x0.clone())
        };
        let stop = StopRule64::new(defaults.stop_kind, defaults.stop_threshold)?;
        let cfg = RunConfig64::new(eta, defaults.tau, defaults.max_iters.max(2000), stop)?.with_projector(s.p.clone());
        let audit = run_adaptive(obj, &x0, &cfg, obj.optimal_value(), 1.0)
            .map_err(anyhow::Error::from)
            .and_then(|t| Ok(contraction_audit(&t)?));
        checks.push(match audit {
            Ok(a) if !a.ratios.is_empty() => {
                let frac = a.fraction_at_most(G_RATIO_BOUND);
                Check {
                    name: "g_contraction",
                    status: soften(status(frac >= G_RATIO_FRACTION), convex),
                    detail: json!({ "eta": eta, "fraction_at_most_0_99": frac, "median": a.median, "p90": a.p90, "gradient_steps": a.ratios.len() }),
                }
            }
            Ok(_) => Check {
                name: "g_contraction",
                status: Status::Skipped,
                detail: json!({ "reason": "no gradient steps with G > 0" }),
            },
            Err(e) => Check {
                name: "g_contraction",
                status: soften(Status::Fail, convex),
                detail: json!({ "error": e.to_string() }),
            },
        });
    }

    let passed = checks.iter().all(|c| c.status != Status::Fail);
    Ok(VerifyReport {
        problem: problem_id.to_string(),
        seed,
        checks,
        passed,
    })
}
