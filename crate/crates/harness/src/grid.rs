//! Hyperparameter grids: every point runs from the same seed and initial
//! point, in parallel, and the table is assembled in grid order.

use std::cmp::Ordering;
use std::io::Write;

use anyhow::bail;
use rayon::prelude::*;
use serde::Serialize;

use crate::runner::execute;
use crate::spec::{Algo, ExperimentSpec};

/// Candidate values; an empty list keeps the base spec's value.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GridSpec {
    pub etas: Vec<f64>,
    pub taus: Vec<f64>,
    pub stepsizes: Vec<f64>,
    pub block_lens: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub eta: f64,
    pub tau: f64,
    pub stepsize: f64,
    pub block_len: usize,
    pub iterations: usize,
    pub terminated_by: String,
    pub reached_stop: bool,
    pub final_diagnostic: Option<f64>,
    /// Set when the run failed; it then counts as budget-exhausted.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridResult {
    pub rows: Vec<GridRow>,
    pub best: usize,
}

impl GridResult {
    pub fn best_row(&self) -> &GridRow {
        &self.rows[self.best]
    }

    pub fn write_csv<W: Write>(&self, out: W) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "eta",
            "tau",
            "stepsize",
            "block_len",
            "iterations",
            "terminated_by",
            "reached_stop",
            "final_diagnostic",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.eta.to_string(),
                r.tau.to_string(),
                r.stepsize.to_string(),
                r.block_len.to_string(),
                r.iterations.to_string(),
                r.terminated_by.clone(),
                r.reached_stop.to_string(),
                r.final_diagnostic.map(|d| format!("{d:.16e}")).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Points in lexicographic order of the varied hyperparameters.
pub fn grid_points(base: &ExperimentSpec, grid: &GridSpec) -> Vec<ExperimentSpec> {
    let or_base = |xs: &[f64], v: f64| if xs.is_empty() { vec![v] } else { xs.to_vec() };
    let mut points = Vec::new();
    match base.algo {
        Algo::Adaptive | Algo::Wrapper => {
            for &eta in &or_base(&grid.etas, base.eta) {
                for &tau in &or_base(&grid.taus, base.tau) {
                    points.push(ExperimentSpec { eta, tau, ..base.clone() });
                }
            }
        }
        Algo::Block => {
            let lens = if grid.block_lens.is_empty() { vec![base.block_len] } else { grid.block_lens.clone() };
            for &stepsize in &or_base(&grid.stepsizes, base.stepsize) {
                for &block_len in &lens {
                    points.push(ExperimentSpec {
                        stepsize,
                        block_len,
                        ..base.clone()
                    });
                }
            }
        }
        Algo::Gd => {
            let steps = if grid.stepsizes.is_empty() { &grid.etas } else { &grid.stepsizes };
            for &stepsize in &or_base(steps, base.stepsize) {
                points.push(ExperimentSpec { stepsize, ..base.clone() });
            }
        }
        Algo::Polyak => points.push(base.clone()),
    }
    points
}

fn run_point(spec: &ExperimentSpec) -> GridRow {
    let row = |iterations, terminated_by: &str, reached_stop, final_diagnostic, error| GridRow {
        eta: spec.eta,
        tau: spec.tau,
        stepsize: spec.stepsize,
        block_len: spec.block_len,
        iterations,
        terminated_by: terminated_by.to_string(),
        reached_stop,
        final_diagnostic,
        error,
    };
    match execute(spec) {
        Ok(out) => row(
            out.iterations,
            out.trace.terminated_by.as_str(),
            out.reached_stop(),
            out.final_diagnostic(),
            None,
        ),
        Err(e) => row(spec.max_iters, "budget", false, None, Some(format!("{e:#}"))),
    }
}

/// Fewest iterations among runs that met the stop rule, then smaller final
/// diagnostic, then grid order.
fn rank(a: &GridRow, b: &GridRow) -> Ordering {
    let diag = |r: &GridRow| r.final_diagnostic.unwrap_or(f64::INFINITY);
    b.reached_stop
        .cmp(&a.reached_stop)
        .then(a.iterations.cmp(&b.iterations))
        .then(diag(a).total_cmp(&diag(b)))
}

pub fn run_grid(base: &ExperimentSpec, grid: &GridSpec) -> anyhow::Result<GridResult> {
    let points = grid_points(base, grid);
    if points.is_empty() {
        bail!("empty grid");
    }
    let rows: Vec<GridRow> = points.par_iter().map(run_point).collect();
    let best = (0..rows.len())
        .min_by(|&i, &j| rank(&rows[i], &rows[j]).then(i.cmp(&j)))
        .expect("nonempty");
    Ok(GridResult { rows, best })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(algo: Algo) -> ExperimentSpec {
        ExperimentSpec::with_defaults("convex_quartic", algo, 0).unwrap()
    }

    #[test]
    fn cardinality_and_order() {
        let g = GridSpec {
            etas: vec![0.5, 1.0],
            taus: vec![0.1, 0.15],
            ..Default::default()
        };
        let pts = grid_points(&base(Algo::Adaptive), &g);
        let pairs: Vec<(f64, f64)> = pts.iter().map(|p| (p.eta, p.tau)).collect();
        assert_eq!(pairs, vec![(0.5, 0.1), (0.5, 0.15), (1.0, 0.1), (1.0, 0.15)]);
        let r = run_grid(&base(Algo::Adaptive), &g).unwrap();
        assert_eq!(r.rows.len(), 4);
        assert!(r.best_row().reached_stop);
    }

    #[test]
    fn single_point() {
        let g = GridSpec {
            etas: vec![1.0],
            taus: vec![0.15],
            ..Default::default()
        };
        let r = run_grid(&base(Algo::Adaptive), &g).unwrap();
        assert_eq!(r.best, 0);
        assert_eq!((r.rows[0].eta, r.rows[0].tau), (1.0, 0.15));
    }

    #[test]
    fn failures_count_as_budget() {
        let g = GridSpec {
            stepsizes: vec![10.0, 0.5],
            ..Default::default()
        };
        let r = run_grid(&base(Algo::Gd), &g).unwrap();
        assert_eq!(r.rows[0].terminated_by, "budget");
        assert!(r.rows[0].error.is_some());
    }

    #[test]
    fn ties_prefer_smaller_diagnostic_then_order() {
        let mk = |it, d| GridRow {
            eta: 1.0,
            tau: 0.1,
            stepsize: 1.0,
            block_len: 1,
            iterations: it,
            terminated_by: "stop_rule".into(),
            reached_stop: true,
            final_diagnostic: Some(d),
            error: None,
        };
        assert_eq!(rank(&mk(10, 1e-7), &mk(10, 2e-7)), Ordering::Less);
        assert_eq!(rank(&mk(9, 5e-7), &mk(10, 1e-7)), Ordering::Less);
        assert_eq!(rank(&mk(10, 1e-7), &mk(10, 1e-7)), Ordering::Equal);
    }
}
