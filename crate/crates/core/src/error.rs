//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode surfaced by the solver and its plumbing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown model family `{0}`")]
    UnknownFamily(String),

    #[error("unknown model parameter `{0}`")]
    UnknownParam(String),

    #[error("parameter `{name}` out of range: {value}")]
    ParamOutOfRange { name: String, value: f64 },

    #[error("multiplier must be nonnegative, got {0}")]
    NegativeI(f64),

    #[error("no finite zero level: Q(I) = {q} meets or exceeds sup b = {sup_b}")]
    Saturated { q: f64, sup_b: f64 },

    #[error("x = {x} outside sampled domain [{x_min}, {x_max}]")]
    OutOfDomain { x: f64, x_min: f64, x_max: f64 },

    #[error("invalid grid: {0}")]
    GridInvalid(String),

    #[error("input mismatch: {0}")]
    InputMismatch(String),

    #[error("matrix row {row} not diagonally dominant")]
    NotDiagonallyDominant { row: usize },

    #[error("singular pivot in row {row}")]
    SingularPivot { row: usize },

    #[error("bracket does not straddle the root: g(lo) = {g_lo}, g(hi) = {g_hi}")]
    BracketInvalid { g_lo: f64, g_hi: f64 },

    #[error("constraint infeasible: new-field max {g_at_zero} < 0 even at I = 0")]
    InfeasibleLow { g_at_zero: f64 },

    #[error("constraint saturated: new-field max {g_at_imax} > 0 at I = I_max")]
    SaturatedHigh { g_at_imax: f64 },

    #[error("explicit step not monotone: dissipation {theta}, max gradient {max_grad}, dt/dx = {dt_over_dx}")]
    MonotonicityViolated {
        theta: f64,
        max_grad: f64,
        dt_over_dx: f64,
    },

    #[error("advective CFL bound broken: measured |u_x| = {grad}, limit {limit}")]
    CflViolation { grad: f64, limit: f64 },

    #[error("exponent overflow: u/epsilon = {0} too large for exp")]
    OverflowDetected(f64),

    #[error("initial datum invalid: max u0 = {max_u0}, expected 0 within {tol}")]
    InitialDatumInvalid { max_u0: f64, tol: f64 },

    #[error("model assumptions fail: {0}")]
    AssumptionsFailed(String),

    #[error("trajectory horizon {t_traj} not covered by multiplier path horizon {t_path}")]
    HorizonMismatch { t_traj: f64, t_path: f64 },

    #[error("no shot from the scan grid brackets the endpoint x = {x}")]
    NoHit { x: f64 },

    #[error("path left the truncation window at s = {s}, gamma = {gamma}")]
    LeftDomain { s: f64, gamma: f64 },

    #[error("value became non-finite in {0}")]
    NonFinite(&'static str),
}
