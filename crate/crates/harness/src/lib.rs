//! Experiment harness around `qd-core`: resolves experiment specs, runs
//! them singly or over grids, writes traces, and runs the verification suite.

pub mod cli;
pub mod figures;
pub mod grid;
pub mod runner;
pub mod spec;
pub mod verify;

pub use cli::{cmd_figure_data, cmd_grid, cmd_run, cmd_verify};
pub use grid::{GridResult, GridRow, GridSpec};
pub use runner::{execute, write_trace_csv, RunOutcome, TRACE_HEADER};
pub use spec::{Algo, ExperimentSpec, SpecOverrides, X0Spec};
pub use verify::{Status, VerifyReport};
