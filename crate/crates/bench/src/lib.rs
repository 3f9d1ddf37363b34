//! Shared fixtures for the benchmark targets.

use hjc_core::{FamilyId, Grid1D, ModelSpec, SampledFunction};

/// Desk-scale grid and initial field at a requested resolution.
pub fn desk_field(n_points: usize) -> (ModelSpec, Grid1D, SampledFunction) {
    let model = ModelSpec::builtin(FamilyId::Satexp);
    let grid = Grid1D::new(-5.0, 15.0, n_points).expect("valid grid");
    let field = SampledFunction::from_fn(grid, |x| model.u0(x)).expect("finite datum");
    (model, grid, field)
}

/// A field whose maximum sits slightly below zero, shaped like the state the
/// per-step constraint solve sees mid-run.
pub fn near_constraint_field(n_points: usize) -> (ModelSpec, Grid1D, SampledFunction) {
    let (model, grid, _) = desk_field(n_points);
    let field = SampledFunction::from_fn(grid, |x: f64| {
        (-0.5 * (x - 1.0) * (x - 1.0)).max(-4.0) - 1e-4
    })
    .expect("finite field");
    (model, grid, field)
}
