//! CSV bundles consumed by the plotting script.

use std::path::Path;

use anyhow::{bail, Context};
use serde::Serialize;
use serde_json::{json, Value};

use qd_core::problems::{ravine_curve, ConvexQuartic, NonconvexQuartic};
use qd_core::Objective;

use crate::runner::{execute, minimizer_split, write_trace_csv};
use crate::spec::{Algo, ExperimentSpec};

pub const FIGURE_IDS: [&str; 4] = ["fig1", "fig2", "fig3", "fig4"];

/// Grid points per axis of the surface plots.
pub const SURFACE_RESOLUTION: usize = 101;
const RAVINE_SAMPLES: usize = 201;

#[derive(Debug, Serialize)]
struct TraceEntry {
    problem: String,
    method: String,
    file: Option<String>,
    params: Value,
    x0: Vec<f64>,
    stop_kind: String,
    stop_threshold: f64,
    /// Column holding the stop diagnostic (`dist`, or `f` for a value gap with f* = 0).
    diagnostic_column: &'static str,
    iterations: Option<usize>,
    terminated_by: String,
}

fn write_surface(obj: &dyn Objective<f64>, problem: &str, dir: &Path, fig: &str) -> anyhow::Result<()> {
    let n = SURFACE_RESOLUTION;
    let axis = |i: usize| -1.0 + 2.0 * i as f64 / (n - 1) as f64;
    let mut w = csv::Writer::from_path(dir.join("surface.csv"))?;
    w.write_record(["v", "u", "f"])?;
    for i in 0..n {
        for j in 0..n {
            let (v, u) = (axis(i), axis(j));
            w.write_record([format!("{v:.16e}"), format!("{u:.16e}"), format!("{:.16e}", obj.value(&[v, u]))])?;
        }
    }
    w.flush()?;

    let us: Vec<f64> = (0..RAVINE_SAMPLES)
        .map(|i| -1.0 + 2.0 * i as f64 / (RAVINE_SAMPLES - 1) as f64)
        .collect();
    let mut w = csv::Writer::from_path(dir.join("ravine.csv"))?;
    w.write_record(["v", "u"])?;
    for (v, u) in ravine_curve(problem, &us)? {
        w.write_record([format!("{v:.16e}"), format!("{u:.16e}")])?;
    }
    w.flush()?;

    let split = minimizer_split(obj)?;
    let manifest = json!({
        "figure": fig,
        "problem": problem,
        "coordinates": ["v", "u"],
        "surface": "surface.csv",
        "ravine": "ravine.csv",
        "range_projector": split.p.as_slice(),
        "null_projector": split.q.as_slice(),
        "hessian_at_origin": split.hessian.as_slice(),
    });
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

fn method_specs(problem: &str, seed: u64) -> anyhow::Result<Vec<(String, ExperimentSpec)>> {
    let base = |algo| ExperimentSpec::with_defaults(problem, algo, seed);
    let mut out = vec![
        ("adaptive".to_string(), base(Algo::Adaptive)?),
        ("block".to_string(), base(Algo::Block)?),
        ("gd".to_string(), base(Algo::Gd)?),
    ];
    if matches!(problem, "convex_quartic" | "nonconvex_quartic") {
        out.push(("polyak".to_string(), base(Algo::Polyak)?));
    }
    Ok(out)
}

fn params(spec: &ExperimentSpec) -> Value {
    match spec.algo {
        Algo::Adaptive | Algo::Wrapper => json!({ "eta": spec.eta, "tau": spec.tau }),
        Algo::Block => json!({ "stepsize": spec.stepsize, "block_len": spec.block_len }),
        Algo::Gd => json!({ "stepsize": spec.stepsize }),
        Algo::Polyak => json!({}),
    }
}

fn write_traces(problems: &[&str], dir: &Path, fig: &str, seed: u64) -> anyhow::Result<()> {
    let mut entries = Vec::new();
    for &problem in problems {
        for (method, spec) in method_specs(problem, seed)? {
            let pspec = spec.problem_spec()?;
            let dim = pspec.build::<f64>()?.dim();
            let x0 = spec.initial_point(&pspec, dim)?.into_inner();
            let mut entry = TraceEntry {
                problem: problem.to_string(),
                method: method.clone(),
                file: None,
                params: params(&spec),
                x0,
                stop_kind: spec.stop_kind.as_str().to_string(),
                stop_threshold: spec.stop_threshold,
                diagnostic_column: match spec.stop_kind {
                    qd_core::StopKind::Distance => "dist",
                    qd_core::StopKind::GradientNorm => "grad_norm",
                    qd_core::StopKind::ValueGap => "f",
                },
                iterations: None,
                terminated_by: "diverged".to_string(),
            };
            if let Ok(out) = execute(&spec) {
                let name = format!("{problem}_{method}.csv");
                let f = std::fs::File::create(dir.join(&name))?;
                write_trace_csv(&out.trace, std::io::BufWriter::new(f))?;
                entry.file = Some(name);
                entry.iterations = Some(out.iterations);
                entry.terminated_by = out.trace.terminated_by.as_str().to_string();
            }
            entries.push(entry);
        }
    }
    let manifest = json!({ "figure": fig, "seed": seed, "traces": entries });
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

/// Writes the bundle for `figure_id` into `dir`, creating it if needed.
pub fn figure_data(figure_id: &str, dir: &Path, seed: u64) -> anyhow::Result<()> {
    if !FIGURE_IDS.contains(&figure_id) {
        bail!("unknown figure `{figure_id}` (expected one of {})", FIGURE_IDS.join(", "));
    }
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    match figure_id {
        "fig1" => write_surface(&ConvexQuartic, "convex_quartic", dir, figure_id),
        "fig2" => write_surface(&NonconvexQuartic, "nonconvex_quartic", dir, figure_id),
        "fig3" => write_traces(&["convex_quartic", "nonconvex_quartic"], dir, figure_id, seed),
        _ => write_traces(&["quartic_rosenbrock", "quadratic_sensing", "single_neuron"], dir, figure_id, seed),
    }
}
