//! Solver core for the constrained Hamilton-Jacobi equation
//! u_t = u_x^2 + R(x, I(t)) with max_x u(., t) = 0: reaction models, the
//! regularized parabolic solver, two constrained limit routes, path
//! reconstruction, and the diagnostics suite.

pub mod diagnostics;
pub mod error;
pub mod limit;
pub mod model;
pub mod numerics;
pub mod trajectories;
pub mod viscous;

pub use diagnostics::{diag_suite, sweep_eps, CheckEntry, CheckStatus, DiagnosticsReport, SweepRow, SweepTable};
pub use error::{Error, Result};
pub use limit::{
    advance_field_fd, advance_field_lax, enforce_constraint, run_limit, zero_reaction_residual,
    EnforceOutcome, LfDissipation, LimitConfig, LimitSample, LimitSolution, RenormStats, Route,
    StepParams,
};
pub use model::{
    check_assumptions, default_i_samples, resolve_model, AssumptionEntry, AssumptionReport,
    AssumptionStatus, FamilyId, ModelSpec,
};
pub use trajectories::{
    action, check_path_above_zero_level, max_point_trajectory, optimize_endpoint,
    shoot_from_initial, truncate_plus, MaxPointOutcome, MultiplierPath, OptimizeOutcome,
    ReactionField, Trajectory, ZeroLevelReport,
};
pub use numerics::{
    argmax_refined, bisect_monotone, interp_linear, min_second_difference, solve_tridiagonal,
    trapezoid, upper_envelope_brute, upper_envelope_quadratic, ArgmaxResult, Grid1D,
    SampledFunction, TimeGrid,
};
pub use viscous::{
    compute_i_eps, hopf_cole_density, implicit_diffusion, run_viscous, step_viscous,
    ViscousConfig, ViscousSample, ViscousSolution,
};
