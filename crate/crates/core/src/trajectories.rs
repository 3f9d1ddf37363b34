//! Characteristic paths for the constrained equation: the solution value at
//! (x, t) is the best action over paths ending there, and the maximum point
//! traces a path with zero terminal velocity.
//!
//! Paths extremize u0(gamma(0)) + integral of (-gamma_dot^2/4 + R(gamma, I)),
//! so they obey gamma_ddot = -2 R_x(gamma, I(s)) with the free-left-endpoint
//! condition gamma_dot(0) = -2 u0'(gamma(0)). Everything here works against a
//! recorded multiplier path, treated as data.

use crate::error::{Error, Result};
use crate::limit::LimitSolution;
use crate::model::ModelSpec;
use crate::viscous::ViscousSolution;

/// The fields a path integrator needs; implemented by the model and by
/// test doubles.
pub trait ReactionField {
    fn r(&self, x: f64, i: f64) -> f64;
    fn r_x(&self, x: f64, i: f64) -> f64;
    fn u0(&self, x: f64) -> f64;
    fn u0_prime(&self, x: f64) -> f64;
    /// Spatial window paths must stay inside.
    fn window(&self) -> (f64, f64);
}

impl ReactionField for ModelSpec {
    fn r(&self, x: f64, i: f64) -> f64 {
        ModelSpec::r(self, x, i)
    }
    fn r_x(&self, x: f64, i: f64) -> f64 {
        ModelSpec::r_x(self, x, i)
    }
    fn u0(&self, x: f64) -> f64 {
        ModelSpec::u0(self, x)
    }
    fn u0_prime(&self, x: f64) -> f64 {
        ModelSpec::u0_prime(self, x)
    }
    fn window(&self) -> (f64, f64) {
        self.domain_hint
    }
}

/// A recorded multiplier history; piecewise-linear in time, constant beyond
/// its ends.
#[derive(Debug, Clone)]
pub struct MultiplierPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl MultiplierPath {
    pub fn constant(i: f64, t_final: f64) -> Self {
        MultiplierPath {
            times: vec![0.0, t_final],
            values: vec![i, i],
        }
    }

    pub fn from_limit(sol: &LimitSolution) -> Self {
        MultiplierPath {
            times: sol.times(),
            values: sol.multiplier_values(),
        }
    }

    pub fn from_viscous(sol: &ViscousSolution) -> Self {
        MultiplierPath {
            times: sol.times(),
            values: sol.multiplier_values(),
        }
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("nonempty path")
    }

    /// Value at time t: linear between samples, clamped outside.
    pub fn at(&self, t: f64) -> f64 {
        let ts = &self.times;
        let n = ts.len();
        if t <= ts[0] {
            return self.values[0];
        }
        if t >= ts[n - 1] {
            return self.values[n - 1];
        }
        let k = ts.partition_point(|&s| s <= t);
        let (t0, t1) = (ts[k - 1], ts[k]);
        let w = (t - t0) / (t1 - t0);
        (1.0 - w) * self.values[k - 1] + w * self.values[k]
    }
}

/// A sampled path with its endpoint data and recomputed action.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
    /// (position, time) the path ends at.
    pub endpoint: (f64, f64),
    pub initial_point: f64,
    pub action: f64,
}

/// Action of a sampled path: u0 at the left endpoint plus the non-uniform
/// trapezoid of -v^2/4 + R along it.
pub fn action<F: ReactionField>(
    traj: &Trajectory,
    i_path: &MultiplierPath,
    field: &F,
) -> Result<f64> {
    let t_end = traj.endpoint.1;
    if t_end > i_path.horizon() + 1e-9 {
        return Err(Error::HorizonMismatch {
            t_traj: t_end,
            t_path: i_path.horizon(),
        });
    }
    if traj.times.len() != traj.positions.len() || traj.times.len() != traj.velocities.len() {
        return Err(Error::InputMismatch(
            "trajectory arrays have mismatched lengths".into(),
        ));
    }
    let lagrangian: Vec<f64> = traj
        .times
        .iter()
        .zip(traj.positions.iter().zip(&traj.velocities))
        .map(|(&s, (&g, &v))| -v * v / 4.0 + field.r(g, i_path.at(s)))
        .collect();
    let mut integral = 0.0;
    for k in 1..traj.times.len() {
        let ds = traj.times[k] - traj.times[k - 1];
        integral += 0.5 * ds * (lagrangian[k] + lagrangian[k - 1]);
    }
    Ok(field.u0(traj.initial_point) + integral)
}

/// RK4 right-hand side for (gamma, v).
fn ode_rhs<F: ReactionField>(field: &F, i_path: &MultiplierPath, s: f64, g: f64, v: f64) -> (f64, f64) {
    (v, -2.0 * field.r_x(g, i_path.at(s)))
}

fn rk4_step<F: ReactionField>(
    field: &F,
    i_path: &MultiplierPath,
    s: f64,
    h: f64,
    g: f64,
    v: f64,
) -> (f64, f64) {
    let (k1g, k1v) = ode_rhs(field, i_path, s, g, v);
    let (k2g, k2v) = ode_rhs(field, i_path, s + 0.5 * h, g + 0.5 * h * k1g, v + 0.5 * h * k1v);
    let (k3g, k3v) = ode_rhs(field, i_path, s + 0.5 * h, g + 0.5 * h * k2g, v + 0.5 * h * k2v);
    let (k4g, k4v) = ode_rhs(field, i_path, s + h, g + h * k3g, v + h * k3v);
    (
        g + h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g),
        v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )
}

fn check_window<F: ReactionField>(field: &F, s: f64, g: f64) -> Result<()> {
    let (lo, hi) = field.window();
    if g < lo || g > hi {
        return Err(Error::LeftDomain { s, gamma: g });
    }
    Ok(())
}

/// Integrate the path equation forward from y0 with the free-endpoint
/// velocity -2 u0'(y0).
pub fn shoot_from_initial<F: ReactionField>(
    field: &F,
    y0: f64,
    t: f64,
    i_path: &MultiplierPath,
    n_steps: usize,
) -> Result<Trajectory> {
    if !(t > 0.0) {
        return Err(Error::GridInvalid("path horizon must be positive".into()));
    }
    if t > i_path.horizon() + 1e-9 {
        return Err(Error::HorizonMismatch {
            t_traj: t,
            t_path: i_path.horizon(),
        });
    }
    let n = n_steps.max(10);
    let h = t / n as f64;
    let mut g = y0;
    let mut v = -2.0 * field.u0_prime(y0);
    check_window(field, 0.0, g)?;
    let mut times = Vec::with_capacity(n + 1);
    let mut positions = Vec::with_capacity(n + 1);
    let mut velocities = Vec::with_capacity(n + 1);
    times.push(0.0);
    positions.push(g);
    velocities.push(v);
    for k in 0..n {
        let s = k as f64 * h;
        let (gn, vn) = rk4_step(field, i_path, s, h, g, v);
        g = gn;
        v = vn;
        let sn = (k + 1) as f64 * h;
        check_window(field, sn, g)?;
        times.push(sn);
        positions.push(g);
        velocities.push(v);
    }
    let mut traj = Trajectory {
        times,
        positions,
        velocities,
        endpoint: (g, t),
        initial_point: y0,
        action: 0.0,
    };
    traj.action = action(&traj, i_path, field)?;
    Ok(traj)
}

/// Shooting result for a fixed endpoint.
#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    pub best: Trajectory,
    /// Every refined path that hits the endpoint, best included.
    pub branches: Vec<Trajectory>,
    /// True when two branches tie in action to 1e-10; the smaller initial
    /// point wins.
    pub tied: bool,
}

/// Find the action-maximizing path(s) ending at (x, t) by scanning initial
/// points, bracketing sign changes of the shooting map, and bisecting each
/// bracket.
pub fn optimize_endpoint<F: ReactionField>(
    field: &F,
    x: f64,
    t: f64,
    i_path: &MultiplierPath,
    scan: &[f64],
    n_steps: usize,
) -> Result<OptimizeOutcome> {
    if scan.len() < 2 {
        return Err(Error::InputMismatch(
            "endpoint scan needs at least two initial points".into(),
        ));
    }
    let miss = |y0: f64| -> Result<f64> {
        Ok(shoot_from_initial(field, y0, t, i_path, n_steps)?.endpoint.0 - x)
    };
    let mut roots: Vec<f64> = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &y in scan {
        let m = match miss(y) {
            Ok(m) => m,
            // paths from this start leave the window; skip the scan point
            Err(Error::LeftDomain { .. }) => {
                prev = None;
                continue;
            }
            Err(e) => return Err(e),
        };
        if let Some((y_prev, m_prev)) = prev {
            if m_prev == 0.0 {
                roots.push(y_prev);
            } else if m_prev * m <= 0.0 && m != 0.0 {
                // bisect the bracket on the shooting map
                let (mut a, mut b) = (y_prev, y);
                let mut ma = m_prev;
                for _ in 0..60 {
                    let mid = 0.5 * (a + b);
                    let mm = miss(mid)?;
                    if ma * mm <= 0.0 {
                        b = mid;
                    } else {
                        a = mid;
                        ma = mm;
                    }
                }
                roots.push(0.5 * (a + b));
            }
        }
        prev = Some((y, m));
    }
    if let Some((y_last, m_last)) = prev {
        if m_last == 0.0 {
            roots.push(y_last);
        }
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-8);
    if roots.is_empty() {
        return Err(Error::NoHit { x });
    }
    let mut branches = Vec::with_capacity(roots.len());
    for y in roots {
        branches.push(shoot_from_initial(field, y, t, i_path, n_steps)?);
    }
    let mut best_idx = 0;
    let mut tied = false;
    for (k, b) in branches.iter().enumerate().skip(1) {
        let d = b.action - branches[best_idx].action;
        if d.abs() <= 1e-10 {
            tied = true;
            if b.initial_point < branches[best_idx].initial_point {
                best_idx = k;
            }
        } else if d > 0.0 {
            best_idx = k;
        }
    }
    Ok(OptimizeOutcome {
        best: branches[best_idx].clone(),
        branches,
        tied,
    })
}

/// Backward characteristic from the recorded maximum point.
#[derive(Debug, Clone)]
pub struct MaxPointOutcome {
    pub trajectory: Trajectory,
    /// |v(0) + 2 u0'(gamma(0))|: how far the reconstructed path is from the
    /// free-endpoint condition it should satisfy.
    pub transversality_residual: f64,
}

/// Integrate backward from (x_max(t), zero velocity) to s = 0 and report the
/// path in forward time.
pub fn max_point_trajectory(
    solution: &LimitSolution,
    model: &ModelSpec,
    t: f64,
) -> Result<MaxPointOutcome> {
    let i_path = MultiplierPath::from_limit(solution);
    if t > i_path.horizon() + 1e-9 {
        return Err(Error::HorizonMismatch {
            t_traj: t,
            t_path: i_path.horizon(),
        });
    }
    if t < 0.0 {
        return Err(Error::GridInvalid("path horizon must be nonnegative".into()));
    }
    let row = solution
        .series
        .iter()
        .min_by(|a, b| {
            (a.t - t).abs()
                .partial_cmp(&(b.t - t).abs())
                .expect("finite times")
        })
        .ok_or_else(|| Error::InputMismatch("solution has no series rows".into()))?;
    let x_bar = row.x_max;

    if t == 0.0 {
        let traj = Trajectory {
            times: vec![0.0],
            positions: vec![x_bar],
            velocities: vec![0.0],
            endpoint: (x_bar, 0.0),
            initial_point: x_bar,
            action: model.u0(x_bar),
        };
        let res = (2.0 * ReactionField::u0_prime(model, x_bar)).abs();
        return Ok(MaxPointOutcome {
            trajectory: traj,
            transversality_residual: res,
        });
    }

    // backward in s as forward in sigma = t - s
    let n = ((t / 2e-3).ceil() as usize).max(10);
    let h = t / n as f64;
    let mut g = x_bar;
    let mut v = 0.0;
    let mut times = Vec::with_capacity(n + 1);
    let mut positions = Vec::with_capacity(n + 1);
    let mut velocities = Vec::with_capacity(n + 1);
    times.push(t);
    positions.push(g);
    velocities.push(v);
    for k in 0..n {
        let sigma = k as f64 * h;
        // d(gamma)/d(sigma) = -v, dv/d(sigma) = +2 R_x at s = t - sigma
        let rhs = |sig: f64, gg: f64, vv: f64| -> (f64, f64) {
            (-vv, 2.0 * model.r_x(gg, i_path.at(t - sig)))
        };
        let (k1g, k1v) = rhs(sigma, g, v);
        let (k2g, k2v) = rhs(sigma + 0.5 * h, g + 0.5 * h * k1g, v + 0.5 * h * k1v);
        let (k3g, k3v) = rhs(sigma + 0.5 * h, g + 0.5 * h * k2g, v + 0.5 * h * k2v);
        let (k4g, k4v) = rhs(sigma + h, g + h * k3g, v + h * k3v);
        g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        let s = t - (k + 1) as f64 * h;
        check_window(model, s, g)?;
        times.push(s);
        positions.push(g);
        velocities.push(v);
    }
    times.reverse();
    positions.reverse();
    velocities.reverse();
    let res = (velocities[0] + 2.0 * ReactionField::u0_prime(model, positions[0])).abs();
    let mut traj = Trajectory {
        times,
        endpoint: (x_bar, t),
        initial_point: positions[0],
        positions,
        velocities,
        action: 0.0,
    };
    traj.action = action(&traj, &i_path, model)?;
    Ok(MaxPointOutcome {
        trajectory: traj,
        transversality_residual: res,
    })
}

/// Clip a path to the nonnegative half-line: negative positions go to zero
/// with zero velocity there, and the action is recomputed. For reactions
/// that are flat left of zero this never lowers the action.
pub fn truncate_plus<F: ReactionField>(
    traj: &Trajectory,
    i_path: &MultiplierPath,
    field: &F,
) -> Result<Trajectory> {
    let mut out = traj.clone();
    for (g, v) in out.positions.iter_mut().zip(&mut out.velocities) {
        if *g < 0.0 {
            *g = 0.0;
            *v = 0.0;
        }
    }
    out.initial_point = out.positions[0];
    out.endpoint.0 = *out.positions.last().expect("nonempty path");
    out.action = action(&out, i_path, field)?;
    Ok(out)
}

/// Where a path sits relative to the moving zero level of the reaction.
#[derive(Debug, Clone)]
pub struct ZeroLevelReport {
    /// Smallest gamma(s) - x_zero(I(s)) over the interior sample window.
    pub margin: f64,
    pub s_at_min: f64,
    /// margin >= -dx for the run's grid spacing.
    pub pass: bool,
    /// |margin| within 1e-12: the path rides the level exactly, which is the
    /// expected stall-phase geometry rather than a violation.
    pub boundary_case: bool,
}

/// Compare a path against the zero level x_zero(I(s)) of the run it belongs
/// to, over the interior window s in [0.05 t, 0.95 t] (endpoint layers are
/// excluded: the left end obeys the free condition, the right end sits at
/// the maximum). Samples where the level is undefined (saturated reaction)
/// are skipped.
pub fn check_path_above_zero_level(
    traj: &Trajectory,
    solution: &LimitSolution,
) -> Result<ZeroLevelReport> {
    let t_end = traj.endpoint.1;
    let horizon = solution.series.last().expect("nonempty series").t;
    if t_end > horizon + 1e-9 {
        return Err(Error::HorizonMismatch {
            t_traj: t_end,
            t_path: horizon,
        });
    }
    let i_path = MultiplierPath::from_limit(solution);
    let model = &solution.config.model;
    let (lo, hi) = (0.05 * t_end, 0.95 * t_end);
    let mut margin = f64::INFINITY;
    let mut s_at_min = lo;
    let mut samples = 0usize;
    for (&s, &g) in traj.times.iter().zip(&traj.positions) {
        if s < lo || s > hi {
            continue;
        }
        let level = match model.zero_level_x(i_path.at(s)) {
            Ok(v) => v,
            Err(_) => continue,
        };
        samples += 1;
        let m = g - level;
        if m < margin {
            margin = m;
            s_at_min = s;
        }
    }
    if samples < 2 {
        return Err(Error::InputMismatch(
            "path too short to compare against the zero level".into(),
        ));
    }
    let dx = solution.config.grid.dx();
    Ok(ZeroLevelReport {
        margin,
        s_at_min,
        pass: margin >= -dx,
        boundary_case: margin.abs() <= 1e-12,
    })
}
