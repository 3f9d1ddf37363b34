//! Constrained routes: march the field with the reaction, then pick the
//! multiplier at each step so the grid maximum returns to zero.
//!
//! Two spatial advances are provided. The monotone finite-difference route
//! uses a central gradient square with local Lax-Friedrichs dissipation in
//! the interior and plain one-sided closures at the ends. The envelope route
//! replaces the transport step with the exact parabolic hop for u_t = u_x^2
//! over one time step. Both inherit the algebraic shortcut that the reaction
//! shifts uniformly in the multiplier, so the per-step root solve touches
//! only the advanced field's maximum.

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::numerics::{
    argmax_refined, bisect_monotone, min_second_difference, upper_envelope_quadratic, Grid1D,
    SampledFunction, TimeGrid,
};

/// Spatial advance used by the constrained march.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    FdMonotone,
    LaxOleinik,
}

impl Route {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "fd" | "fd_monotone" | "fd-monotone" => Ok(Route::FdMonotone),
            "lax" | "lax_oleinik" | "lax-oleinik" => Ok(Route::LaxOleinik),
            other => Err(Error::UnknownParam(format!("route '{}'", other))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Route::FdMonotone => "fd_monotone",
            Route::LaxOleinik => "lax_oleinik",
        }
    }
}

/// Dissipation coefficient policy for the finite-difference route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LfDissipation {
    /// Track twice the largest gradient seen so far, plus headroom.
    Auto,
    Fixed(f64),
}

/// Run parameters for a constrained route.
#[derive(Debug, Clone)]
pub struct LimitConfig {
    pub model: ModelSpec,
    pub grid: Grid1D,
    pub time: TimeGrid,
    pub route: Route,
    /// Width tolerance for the per-step multiplier root solve.
    pub constraint_tol: f64,
    pub lf_dissipation: LfDissipation,
    pub snapshot_stride: usize,
}

impl LimitConfig {
    /// Desk-scale defaults on the model's preferred window. The envelope
    /// route takes far fewer, larger steps: its per-step hop scales with
    /// sqrt(dt), so tiny steps would quantize motion to grid cells.
    pub fn default_desk(model: ModelSpec, route: Route) -> Self {
        let (x_min, x_max) = model.domain_hint;
        let (n_steps, stride) = match route {
            Route::FdMonotone => (2000, 100),
            Route::LaxOleinik => (100, 5),
        };
        LimitConfig {
            model,
            grid: Grid1D::new(x_min, x_max, 2001).expect("builtin window"),
            time: TimeGrid {
                t_final: 2.0,
                n_steps,
            },
            route,
            constraint_tol: 1e-10,
            lf_dissipation: LfDissipation::Auto,
            snapshot_stride: stride,
        }
    }

    /// Halved grid spacing for convergence comparisons. The envelope route's
    /// step shrinks like dx^(2/3) so its hop stays several cells wide.
    pub fn refined_desk(model: ModelSpec, route: Route) -> Self {
        let mut cfg = Self::default_desk(model, route);
        let (x_min, x_max) = cfg.model.domain_hint;
        cfg.grid = Grid1D::new(x_min, x_max, 4001).expect("builtin window");
        let (n_steps, stride) = match route {
            Route::FdMonotone => (4000, 200),
            Route::LaxOleinik => (160, 8),
        };
        cfg.time = TimeGrid {
            t_final: 2.0,
            n_steps,
        };
        cfg.snapshot_stride = stride;
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.constraint_tol > 0.0 && self.constraint_tol.is_finite()) {
            return Err(Error::ParamOutOfRange {
                name: "constraint_tol".into(),
                value: self.constraint_tol,
            });
        }
        if let LfDissipation::Fixed(v) = self.lf_dissipation {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::ParamOutOfRange {
                    name: "lf_dissipation".into(),
                    value: v,
                });
            }
        }
        if self.time.n_steps == 0 || !(self.time.t_final > 0.0) {
            return Err(Error::GridInvalid("time grid must advance".into()));
        }
        Ok(())
    }
}

/// Largest central-difference slope magnitude over interior nodes.
pub(crate) fn max_central_slope(u: &SampledFunction) -> f64 {
    let v = &u.values;
    let two_dx = 2.0 * u.grid.dx();
    let mut m = 0.0f64;
    for j in 1..v.len() - 1 {
        m = m.max(((v[j + 1] - v[j - 1]) / two_dx).abs());
    }
    m
}

/// One explicit monotone step of u_t = u_x^2 + R(x, i).
///
/// Interior nodes: central gradient square plus `lf_dissipation` times the
/// centered second difference over 2 dx. End nodes: first-order one-sided
/// slope, squared, no dissipation. Rejects coefficients too small for
/// monotonicity or too large for the explicit stability bound.
pub fn advance_field_fd(
    u: &SampledFunction,
    i: f64,
    model: &ModelSpec,
    dt: f64,
    lf_dissipation: f64,
) -> Result<SampledFunction> {
    let v = &u.values;
    let n = v.len();
    let dx = u.grid.dx();
    let theta = lf_dissipation;
    let max_grad = max_central_slope(u);
    let dt_over_dx = dt * theta / dx;
    if theta + 1e-12 < 2.0 * max_grad || dt_over_dx > 1.0 + 1e-12 {
        return Err(Error::MonotonicityViolated {
            theta,
            max_grad,
            dt_over_dx,
        });
    }
    let mut out = Vec::with_capacity(n);
    let x0 = u.grid.node(0);
    let p0 = (v[1] - v[0]) / dx;
    out.push(v[0] + dt * (p0 * p0 + model.r(x0, i)));
    for j in 1..n - 1 {
        let p = (v[j + 1] - v[j - 1]) / (2.0 * dx);
        let diss = theta * (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (2.0 * dx);
        out.push(v[j] + dt * (p * p + diss + model.r(u.grid.node(j), i)));
    }
    let xn = u.grid.node(n - 1);
    let pn = (v[n - 1] - v[n - 2]) / dx;
    out.push(v[n - 1] + dt * (pn * pn + model.r(xn, i)));
    SampledFunction::new(u.grid, out)
}

/// One exact-transport step: parabolic upper envelope with curvature
/// 1/(4 dt), then the reaction.
pub fn advance_field_lax(
    u: &SampledFunction,
    i: f64,
    model: &ModelSpec,
    dt: f64,
) -> Result<SampledFunction> {
    let env = upper_envelope_quadratic(&u.values, u.grid, 1.0 / (4.0 * dt));
    let out: Vec<f64> = env
        .into_iter()
        .enumerate()
        .map(|(j, e)| e + dt * model.r(u.grid.node(j), i))
        .collect();
    SampledFunction::new(u.grid, out)
}

/// Per-step inputs for the constrained advance.
#[derive(Debug, Clone)]
pub struct StepParams<'a> {
    pub model: &'a ModelSpec,
    pub dt: f64,
    pub route: Route,
    /// Resolved dissipation coefficient (finite-difference route only).
    pub lf_dissipation: f64,
    pub constraint_tol: f64,
}

impl StepParams<'_> {
    fn advance(&self, u: &SampledFunction, i: f64) -> Result<SampledFunction> {
        match self.route {
            Route::FdMonotone => advance_field_fd(u, i, self.model, self.dt, self.lf_dissipation),
            Route::LaxOleinik => advance_field_lax(u, i, self.model, self.dt),
        }
    }
}

/// Result of one constrained step.
#[derive(Debug, Clone)]
pub struct EnforceOutcome {
    pub field: SampledFunction,
    /// Multiplier active over the step.
    pub i: f64,
    /// Uniform shift applied when the unforced advance undershoots zero by a
    /// rounding-scale amount; zero whenever the root solve ran.
    pub lift: f64,
}

fn node_max(values: &[f64]) -> f64 {
    values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// Advance one step and choose the multiplier so the grid maximum of the new
/// field is zero.
///
/// The reaction obeys R(x, i) = R(x, 0) - Q(i), so the advanced field at
/// multiplier i is the unforced advance minus dt Q(i) pointwise and the
/// constraint residual g(i) = max(base) - dt Q(i) is strictly decreasing.
/// Dispatch on g at the bracket ends:
///   g(0) below -50 dx dt  -> InfeasibleLow (the field detached from zero);
///   g(0) in [-50 dx dt, 0) -> multiplier 0, lift the field by -g(0)
///                             (discretization jitter, not real slack);
///   g(i_max) above zero    -> SaturatedHigh (admissible range exhausted);
///   otherwise              -> bisect for the root, re-advance at it.
pub fn enforce_constraint(u: &SampledFunction, p: &StepParams) -> Result<EnforceOutcome> {
    let base = p.advance(u, 0.0)?;
    let g0 = node_max(&base.values);
    let band = 50.0 * u.grid.dx() * p.dt;
    if g0 < -band {
        return Err(Error::InfeasibleLow { g_at_zero: g0 });
    }
    if g0 < 0.0 {
        let mut lifted = base;
        for v in &mut lifted.values {
            *v -= g0;
        }
        return Ok(EnforceOutcome {
            field: lifted,
            i: 0.0,
            lift: -g0,
        });
    }
    let i_max = p.model.i_max;
    let g_at_imax = g0 - p.dt * p.model.q(i_max);
    if g_at_imax > 0.0 {
        return Err(Error::SaturatedHigh { g_at_imax });
    }
    let i_k = bisect_monotone(
        |i| g0 - p.dt * p.model.q(i),
        0.0,
        i_max,
        p.constraint_tol,
    )?;
    let field = p.advance(u, i_k)?;
    Ok(EnforceOutcome {
        field,
        i: i_k,
        lift: 0.0,
    })
}

/// Per-time scalar diagnostics for a constrained run.
///
/// Row k >= 1 pairs the state at t_k with the multiplier that was active
/// over (t_{k-1}, t_k]; row 0 repeats the first multiplier so the column
/// reads as a left-constant path.
#[derive(Debug, Clone)]
pub struct LimitSample {
    pub t: f64,
    pub i: f64,
    /// Refined location of the field maximum.
    pub x_max: f64,
    /// Root of R(., i) for this row's multiplier; NaN when saturated.
    pub x_zero: f64,
    /// Plain grid maximum (the quantity the constraint controls).
    pub max_u: f64,
    pub semiconvexity_min: f64,
}

/// Tally of rounding-band lifts over a run.
#[derive(Debug, Clone, Default)]
pub struct RenormStats {
    pub count: usize,
    pub max_lift: f64,
    pub total_lift: f64,
    /// Time of the latest lifted step.
    pub last_t: f64,
}

#[derive(Debug, Clone)]
pub struct LimitSolution {
    pub config: LimitConfig,
    /// (time, field) pairs at the snapshot stride, always including the
    /// initial and final fields.
    pub snapshots: Vec<(f64, SampledFunction)>,
    /// One row per time level, `0..=n_steps`.
    pub series: Vec<LimitSample>,
    pub renorm: RenormStats,
    /// Detected irregularities (argmax jumps and the like); informational.
    pub warnings: Vec<String>,
    /// False when the run aborted mid-way; partial output is still returned.
    pub valid: bool,
    pub abort: Option<String>,
}

impl LimitSolution {
    pub fn final_field(&self) -> &SampledFunction {
        &self.snapshots.last().expect("at least the initial field").1
    }

    pub fn times(&self) -> Vec<f64> {
        self.series.iter().map(|s| s.t).collect()
    }

    pub fn multiplier_values(&self) -> Vec<f64> {
        self.series.iter().map(|s| s.i).collect()
    }
}

const MAX_WARNINGS: usize = 16;

fn push_warning(warnings: &mut Vec<String>, msg: String) {
    if warnings.len() < MAX_WARNINGS {
        warnings.push(msg);
    } else if warnings.len() == MAX_WARNINGS {
        warnings.push("further warnings suppressed".into());
    }
}

/// March a constrained route from the model's initial datum.
///
/// Preconditions surface as `Err`: bad config, an initial datum whose
/// refined maximum is not zero within 1e-8, or failed structural
/// assumptions. A failure mid-march returns the partial solution with
/// `valid = false` and the step error recorded in `abort`.
pub fn run_limit(cfg: &LimitConfig) -> Result<LimitSolution> {
    cfg.validate()?;
    let mut u = SampledFunction::from_fn(cfg.grid, |x| cfg.model.u0(x))?;

    let am0 = argmax_refined(&u);
    if am0.f_star.abs() > 1e-8 {
        return Err(Error::InitialDatumInvalid {
            max_u0: am0.f_star,
            tol: 1e-8,
        });
    }
    let i_samples = crate::model::default_i_samples(cfg.model.i_max);
    let report = crate::model::check_assumptions(&cfg.model, cfg.grid, &i_samples);
    if !report.all_pass() {
        return Err(Error::AssumptionsFailed(report.failing_ids().join(", ")));
    }

    let dt = cfg.time.dt();
    let dx = cfg.grid.dx();
    let stride = cfg.snapshot_stride.max(1);
    let zero_x = |i: f64| cfg.model.zero_level_x(i).unwrap_or(f64::NAN);

    let mut running_slope = max_central_slope(&u);
    let mut snapshots = vec![(0.0, u.clone())];
    let mut series = vec![LimitSample {
        t: 0.0,
        i: 0.0, // backfilled with the first step's multiplier below
        x_max: am0.x_star,
        x_zero: 0.0,
        max_u: node_max(&u.values),
        semiconvexity_min: min_second_difference(&u),
    }];
    let mut renorm = RenormStats::default();
    let mut warnings = Vec::new();
    let mut valid = true;
    let mut abort = None;

    for k in 0..cfg.time.n_steps {
        running_slope = running_slope.max(max_central_slope(&u));
        let theta = match cfg.lf_dissipation {
            LfDissipation::Auto => 2.0 * running_slope + 0.5,
            LfDissipation::Fixed(v) => v,
        };
        let params = StepParams {
            model: &cfg.model,
            dt,
            route: cfg.route,
            lf_dissipation: theta,
            constraint_tol: cfg.constraint_tol,
        };
        let outcome = match enforce_constraint(&u, &params) {
            Ok(o) => o,
            Err(e) => {
                valid = false;
                abort = Some(format!("step {} failed: {}", k, e));
                break;
            }
        };
        let t = (k + 1) as f64 * dt;
        if outcome.lift > 0.0 {
            renorm.count += 1;
            renorm.max_lift = renorm.max_lift.max(outcome.lift);
            renorm.total_lift += outcome.lift;
            renorm.last_t = t;
        }
        u = outcome.field;
        if k == 0 {
            series[0].i = outcome.i;
            series[0].x_zero = zero_x(outcome.i);
        }
        let am = argmax_refined(&u);
        let prev_x = series.last().expect("seeded").x_max;
        if (am.x_star - prev_x).abs() > 10.0 * dx {
            push_warning(
                &mut warnings,
                format!(
                    "argmax jumped {:.4} -> {:.4} at t = {:.4}",
                    prev_x, am.x_star, t
                ),
            );
        }
        series.push(LimitSample {
            t,
            i: outcome.i,
            x_max: am.x_star,
            x_zero: zero_x(outcome.i),
            max_u: node_max(&u.values),
            semiconvexity_min: min_second_difference(&u),
        });
        if (k + 1) % stride == 0 && k + 1 < cfg.time.n_steps {
            snapshots.push((t, u.clone()));
        }
    }

    let t_last = series.last().expect("seeded").t;
    if snapshots.last().map(|(t, _)| *t) != Some(t_last) {
        snapshots.push((t_last, u.clone()));
    }

    Ok(LimitSolution {
        config: cfg.clone(),
        snapshots,
        series,
        renorm,
        warnings,
        valid,
        abort,
    })
}

/// Pointwise residual |R(x_max(t), I(t))| from the series rows; the limit
/// solution should ride the zero level of the reaction once the constraint
/// becomes active.
pub fn zero_reaction_residual(solution: &LimitSolution, model: &ModelSpec) -> Vec<(f64, f64)> {
    solution
        .series
        .iter()
        .map(|row| (row.t, model.r(row.x_max, row.i).abs()))
        .collect()
}
