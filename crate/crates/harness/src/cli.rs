//! Command-line front end of the `qd` binary.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use crate::figures::figure_data;
use crate::grid::{run_grid, GridResult, GridSpec};
use crate::runner::{execute, write_outcome, RunOutcome};
use crate::spec::{ExperimentSpec, SpecOverrides};
use crate::verify::{verify, VerifyReport};

/// Environment variable holding the default seed.
pub const SEED_ENV: &str = "QD_SEED";

#[derive(Debug, Parser)]
#[command(name = "qd", version, about = "Adaptive GD/Polyak experiments on quartic-growth objectives")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment and write trace.csv and summary.json.
    Run {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value = "out/run")]
        out: PathBuf,
    },
    /// Run every point of a hyperparameter grid and report the best one.
    Grid {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value = "out/grid")]
        out: PathBuf,
    },
    /// Run the verification suite on a problem; exits nonzero on an unexpected failure.
    Verify {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Report path; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the CSV bundle behind one of the figures (fig1..fig4).
    FigureData {
        #[arg(long)]
        figure: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out/figures")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct SpecArgs {
    /// Key-value file (`key = value` per line); command-line flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub problem: Option<String>,
    /// adaptive, gd, polyak, block or wrapper.
    #[arg(long)]
    pub algo: Option<String>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Stepsize of `gd`, and of the gradient steps inside `block`.
    #[arg(long)]
    pub stepsize: Option<f64>,
    #[arg(long)]
    pub block_len: Option<usize>,
    /// Initial lower bound for `wrapper`.
    #[arg(long, allow_hyphen_values = true)]
    pub h0: Option<f64>,
    #[arg(long)]
    pub outer_epochs: Option<usize>,
    /// `preset`, `random:<radius>`, or a comma-separated vector.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// distance, gradient_norm or value_gap.
    #[arg(long)]
    pub stop_kind: Option<String>,
    #[arg(long)]
    pub stop_threshold: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Log G(x) = ||P grad f(x)||^2 with P from the Hessian at the minimizer.
    #[arg(long)]
    pub record_g: bool,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long)]
    pub search_rank: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    #[arg(long, value_delimiter = ',')]
    pub etas: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub taus: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub stepsizes: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub block_lens: Vec<usize>,
}

impl From<GridArgs> for GridSpec {
    fn from(g: GridArgs) -> Self {
        GridSpec {
            etas: g.etas,
            taus: g.taus,
            stepsizes: g.stepsizes,
            block_lens: g.block_lens,
        }
    }
}

/// Seed from `QD_SEED`, or 0.
pub fn default_seed() -> anyhow::Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s.trim().parse().with_context(|| format!("{SEED_ENV}={s} is not an unsigned integer")),
        Err(_) => Ok(0),
    }
}

impl SpecArgs {
    fn overrides(&self) -> SpecOverrides {
        SpecOverrides {
            problem: self.problem.clone(),
            algo: self.algo.clone(),
            eta: self.eta,
            tau: self.tau,
            stepsize: self.stepsize,
            block_len: self.block_len,
            h0: self.h0,
            outer_epochs: self.outer_epochs,
            x0: self.x0.clone(),
            seed: self.seed,
            stop_kind: self.stop_kind.clone(),
            stop_threshold: self.stop_threshold,
            max_iters: self.max_iters,
            record_g: self.record_g.then_some(true),
            dim: self.dim,
            rank: self.rank,
            search_rank: self.search_rank,
            samples: self.samples,
        }
    }

    pub fn resolve(&self) -> anyhow::Result<ExperimentSpec> {
        let file = match &self.config {
            Some(p) => SpecOverrides::from_file(p)?,
            None => SpecOverrides::default(),
        };
        self.overrides().over(file).resolve(default_seed()?)
    }
}

pub fn cmd_run(spec: &ExperimentSpec, out: &Path) -> anyhow::Result<RunOutcome> {
    let outcome = execute(spec)?;
    write_outcome(&outcome, out)?;
    Ok(outcome)
}

/// Writes `grid.csv` and `best.json` into `out`.
pub fn cmd_grid(base: &ExperimentSpec, grid: &GridSpec, out: &Path) -> anyhow::Result<GridResult> {
    let result = run_grid(base, grid)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    result.write_csv(std::io::BufWriter::new(std::fs::File::create(out.join("grid.csv"))?))?;
    let best = serde_json::json!({ "index": result.best, "row": result.best_row(), "grid": grid });
    std::fs::write(out.join("best.json"), serde_json::to_string_pretty(&best)? + "\n")?;
    Ok(result)
}

pub fn cmd_verify(problem: &str, seed: u64, out: Option<&Path>) -> anyhow::Result<VerifyReport> {
    let report = verify(problem, seed)?;
    let text = serde_json::to_string_pretty(&report)? + "\n";
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(report)
}

pub fn cmd_figure_data(figure: &str, seed: u64, out: &Path) -> anyhow::Result<()> {
    figure_data(figure, out, seed)
}

fn dispatch(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Run { spec, out } => {
            let o = cmd_run(&spec.resolve()?, &out)?;
            eprintln!(
                "{} iterations, terminated by {}, trace in {}",
                o.iterations,
                o.trace.terminated_by.as_str(),
                out.display()
            );
            Ok(true)
        }
        Command::Grid { spec, grid, out } => {
            let r = cmd_grid(&spec.resolve()?, &grid.into(), &out)?;
            println!("{}", serde_json::to_string_pretty(r.best_row())?);
            Ok(true)
        }
        Command::Verify { problem, seed, out } => {
            let seed = seed.map_or_else(default_seed, Ok)?;
            Ok(cmd_verify(&problem, seed, out.as_deref())?.passed)
        }
        Command::FigureData { figure, seed, out } => {
            let seed = seed.map_or_else(default_seed, Ok)?;
            cmd_figure_data(&figure, seed, &out)?;
            Ok(true)
        }
    }
}

pub fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
