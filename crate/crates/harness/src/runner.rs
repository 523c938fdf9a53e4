//! Executing a resolved spec and persisting its trace.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

use qd_core::algorithms::{
    run_adaptive, run_block_gdpolyak, run_gd, run_lower_bound_wrapper, run_polyak, BlockSchedule,
};
use qd_core::analysis::{eigen_split_relative, hessian_at, HessianSplit};
use qd_core::{LowerBoundState64, Objective, RunConfig64, RunTrace64};

use crate::spec::{Algo, ExperimentSpec};

pub const TRACE_HEADER: [&str; 7] = ["k", "f", "grad_norm", "R", "step", "dist", "G"];

/// A finished run. Wrapper epochs are concatenated into one trace with
/// consecutive `k`; `epochs` keeps the estimate history.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub spec: ExperimentSpec,
    pub trace: RunTrace64,
    pub iterations: usize,
    pub epochs: Option<Vec<LowerBoundState64>>,
}

impl RunOutcome {
    pub fn reached_stop(&self) -> bool {
        self.trace.reached_stop()
    }

    pub fn final_diagnostic(&self) -> Option<f64> {
        self.trace.final_diagnostic()
    }

    pub fn summary(&self) -> RunSummary<'_> {
        RunSummary {
            problem: &self.spec.problem,
            algo: self.spec.algo.as_str(),
            seed: self.spec.seed,
            iterations: self.iterations,
            terminated_by: self.trace.terminated_by.as_str(),
            reached_stop: self.reached_stop(),
            stop_kind: self.spec.stop_kind.as_str(),
            stop_threshold: self.spec.stop_threshold,
            final_diagnostic: self.final_diagnostic(),
            final_value: self.trace.last().f_val,
            polyak_steps: self
                .trace
                .records
                .iter()
                .filter(|r| r.step_kind == qd_core::StepKind::Polyak)
                .count(),
            config: &self.spec,
            epochs: self.epochs.as_deref(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunSummary<'a> {
    pub problem: &'a str,
    pub algo: &'a str,
    pub seed: u64,
    pub iterations: usize,
    pub terminated_by: &'a str,
    pub reached_stop: bool,
    pub stop_kind: &'a str,
    pub stop_threshold: f64,
    pub final_diagnostic: Option<f64>,
    pub final_value: f64,
    pub polyak_steps: usize,
    pub config: &'a ExperimentSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epochs: Option<&'a [LowerBoundState64]>,
}

/// Range/null split of the Hessian at the problem's reference minimizer.
pub fn minimizer_split(obj: &dyn Objective<f64>) -> anyhow::Result<HessianSplit<f64>> {
    let xstar = obj.minimizer().context("problem has no reference minimizer")?;
    let h = hessian_at(obj, &xstar);
    match eigen_split_relative(&h) {
        Ok(s) => Ok(s),
        Err(qd_core::Error::AllNull) => Ok(HessianSplit::all_null(h)),
        Err(e) => Err(e.into()),
    }
}

pub fn execute(spec: &ExperimentSpec) -> anyhow::Result<RunOutcome> {
    let problem = spec.problem_spec()?;
    let obj = problem.build::<f64>()?;
    let x0 = spec.initial_point(&problem, obj.dim())?;
    let mut cfg = RunConfig64::new(spec.eta, spec.tau, spec.max_iters, spec.stop_rule()?)?;
    if spec.record_g {
        cfg = cfg.with_projector(minimizer_split(obj.as_ref())?.p);
    }
    let ctx = || format!("{} on {}", spec.algo, spec.problem);
    let (mut trace, epochs) = match spec.algo {
        Algo::Adaptive => (run_adaptive(&obj, &x0, &cfg, obj.optimal_value(), 1.0).with_context(ctx)?, None),
        Algo::Gd => (run_gd(&obj, &x0, spec.stepsize, &cfg).with_context(ctx)?, None),
        Algo::Polyak => (run_polyak(&obj, &x0, &cfg).with_context(ctx)?, None),
        Algo::Block => {
            let sched = BlockSchedule::new(spec.stepsize, spec.block_len)?;
            (run_block_gdpolyak(&obj, &x0, &sched, &cfg).with_context(ctx)?, None)
        }
        Algo::Wrapper => {
            let out = run_lower_bound_wrapper(&obj, &x0, &cfg, spec.h0, spec.outer_epochs).with_context(ctx)?;
            let iterations = out.total_iterations();
            let mut traces = out.traces.into_iter();
            let mut merged = traces.next().expect("at least one epoch");
            for t in traces {
                merged.records.extend(t.records);
                merged.terminated_by = t.terminated_by;
                merged.final_point = t.final_point;
                merged.best_point = t.best_point;
            }
            for (k, r) in merged.records.iter_mut().enumerate() {
                r.k = k;
            }
            return Ok(RunOutcome {
                spec: spec.clone(),
                trace: RunTrace64 {
                    seed: spec.seed,
                    ..merged
                },
                iterations,
                epochs: Some(out.states),
            });
        }
    };
    trace.seed = spec.seed;
    Ok(RunOutcome {
        spec: spec.clone(),
        iterations: trace.iterations(),
        trace,
        epochs,
    })
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn write_trace_csv<W: Write>(trace: &RunTrace64, out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in &trace.records {
        w.write_record([
            r.k.to_string(),
            num(r.f_val),
            num(r.grad_norm),
            opt(r.ratio_r),
            r.step_kind.csv_token().to_string(),
            opt(r.distance),
            opt(r.proj_grad_sq),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `trace.csv` and `summary.json` into `dir`.
pub fn write_outcome(outcome: &RunOutcome, dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let f = std::fs::File::create(dir.join("trace.csv"))?;
    write_trace_csv(&outcome.trace, std::io::BufWriter::new(f))?;
    let summary = serde_json::to_string_pretty(&outcome.summary())?;
    std::fs::write(dir.join("summary.json"), summary + "\n")?;
    Ok(())
}
