//! Finite-difference calculus, Hessian range/null splitting and the
//! numerical checks built on them.

mod audit;
mod cubic;
mod fd;
mod growth;
mod split;

pub use audit::{
    check_distance_monotone, check_gd_descent, check_polyak_contraction, contraction_audit,
    proj_grad_sq, ContractionAudit, StepCheck,
};
pub use cubic::{check_vanishing_cubics, CubicCheckReport};
pub use fd::{
    fd_gradient, fd_hessian, gradient_check, hessian_at, third_form, GradientCheck,
    FD_GRADIENT_STEP, FD_HESSIAN_STEP, FD_THIRD_STEP,
};
pub use growth::growth_estimate;
pub use split::{eigen_split, eigen_split_relative, HessianSplit, SplitWarning, DEFAULT_RELATIVE_NULL_TOL};
