//! Step rules and the run drivers built from them.

mod drivers;
mod steps;
mod wrapper;

pub use drivers::{
    run_adaptive, run_block_gdpolyak, run_gd, run_polyak, BlockSchedule, DIVERGENCE_VALUE,
};
pub use steps::{gd_step, polyak_step};
pub use wrapper::{run_lower_bound_wrapper, LowerBoundState, WrapperOutcome};
