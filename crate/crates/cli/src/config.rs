//! Run configuration: a TOML file of blocks plus command-line overrides.
//!
//! Blocks are all-or-nothing: an absent block takes the documented desk
//! defaults, a present block must carry its required keys. The resolved
//! configuration is echoed into each run directory as `effective_config.toml`
//! so any run can be reproduced from its own artifacts.

use anyhow::{bail, Context, Result};
use hjc_core::{
    resolve_model, Grid1D, LfDissipation, LimitConfig, ModelSpec, Route, TimeGrid, ViscousConfig,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub family: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl Default for ModelBlock {
    fn default() -> Self {
        ModelBlock {
            family: "satexp".into(),
            params: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Default for GridBlock {
    fn default() -> Self {
        GridBlock {
            x_min: -5.0,
            x_max: 15.0,
            n_points: 2001,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeBlock {
    pub t_final: f64,
    pub n_steps: usize,
}

impl Default for TimeBlock {
    fn default() -> Self {
        TimeBlock {
            t_final: 2.0,
            n_steps: 2000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitBlock {
    #[serde(default = "default_route")]
    pub route: String,
    #[serde(default = "default_constraint_tol")]
    pub constraint_tol: f64,
    /// Fixed artificial-dissipation coefficient; absent means automatic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dissipation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_stride: Option<usize>,
}

fn default_route() -> String {
    "fd".into()
}

fn default_constraint_tol() -> f64 {
    1e-10
}

impl Default for LimitBlock {
    fn default() -> Self {
        LimitBlock {
            route: default_route(),
            constraint_tol: default_constraint_tol(),
            dissipation: None,
            snapshot_stride: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViscousBlock {
    pub epsilon: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_picard")]
    pub picard_iters: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_stride: Option<usize>,
}

fn default_cfl() -> f64 {
    0.45
}

fn default_picard() -> usize {
    2
}

impl Default for ViscousBlock {
    fn default() -> Self {
        ViscousBlock {
            epsilon: 0.25,
            cfl: default_cfl(),
            picard_iters: default_picard(),
            snapshot_stride: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub eps_ladder: Vec<f64>,
    #[serde(default = "default_route")]
    pub route: String,
}

impl Default for SweepBlock {
    fn default() -> Self {
        SweepBlock {
            eps_ladder: vec![0.25, 0.1, 0.05],
            route: default_route(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyBlock {
    #[serde(default = "default_ladder")]
    pub eps_ladder: Vec<f64>,
    /// Time steps for the monotone finite-difference route (and the viscous
    /// runs, which share its step size).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lax_steps: Option<usize>,
}

fn default_ladder() -> Vec<f64> {
    vec![0.25, 0.1, 0.05]
}

impl Default for VerifyBlock {
    fn default() -> Self {
        VerifyBlock {
            eps_ladder: default_ladder(),
            fd_steps: None,
            lax_steps: None,
        }
    }
}

/// The on-disk configuration. Every block is optional in the file; the
/// resolved echo written next to the outputs has the effective values filled
/// in.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<LimitBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub viscous: Option<ViscousBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyBlock>,
}

impl RunConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    /// The config's own mode must agree with the invoked subcommand.
    pub fn check_mode(&self, invoked: &str) -> Result<()> {
        if let Some(mode) = &self.mode {
            let known = [
                "viscous", "limit", "traj", "verify", "sweep-eps", "compare", "check-model",
            ];
            if !known.contains(&mode.as_str()) {
                bail!("unknown mode {:?} in config", mode);
            }
            if mode != invoked {
                bail!("config sets mode {:?} but the {} subcommand was invoked", mode, invoked);
            }
        }
        Ok(())
    }

    pub fn resolve_model_spec(&self) -> Result<ModelSpec> {
        let block = self.model.clone().unwrap_or_default();
        let spec = resolve_model(&block.family, &block.params)?;
        Ok(spec)
    }

    pub fn resolve_grid(&self) -> Result<Grid1D> {
        let block = self.grid.unwrap_or_default();
        Ok(Grid1D::new(block.x_min, block.x_max, block.n_points)?)
    }

    pub fn resolve_time(&self) -> TimeGrid {
        let block = self.time.unwrap_or_default();
        TimeGrid {
            t_final: block.t_final,
            n_steps: block.n_steps,
        }
    }

    pub fn resolve_limit(&self) -> Result<LimitConfig> {
        let model = self.resolve_model_spec()?;
        let grid = self.resolve_grid()?;
        let time = self.resolve_time();
        let block = self.limit.clone().unwrap_or_default();
        let route = Route::parse(&block.route)?;
        Ok(LimitConfig {
            model,
            grid,
            time,
            route,
            constraint_tol: block.constraint_tol,
            lf_dissipation: match block.dissipation {
                Some(theta) => LfDissipation::Fixed(theta),
                None => LfDissipation::Auto,
            },
            snapshot_stride: block
                .snapshot_stride
                .unwrap_or_else(|| (time.n_steps / 20).max(1)),
        })
    }

    pub fn resolve_viscous(&self) -> Result<ViscousConfig> {
        let model = self.resolve_model_spec()?;
        let grid = self.resolve_grid()?;
        let time = self.resolve_time();
        let block = self.viscous.clone().unwrap_or_default();
        Ok(ViscousConfig {
            model,
            grid,
            time,
            epsilon: block.epsilon,
            cfl: block.cfl,
            picard_iters: block.picard_iters,
            snapshot_stride: block
                .snapshot_stride
                .unwrap_or_else(|| (time.n_steps / 20).max(1)),
        })
    }

    /// Fill every block with its effective value for the manifest echo.
    pub fn resolved_echo(&self, mode: &str, output_dir: &Path) -> RunConfigFile {
        let mut echo = self.clone();
        echo.mode = Some(mode.to_string());
        echo.output_dir = Some(output_dir.to_path_buf());
        echo.model = Some(echo.model.unwrap_or_default());
        echo.grid = Some(echo.grid.unwrap_or_default());
        echo.time = Some(echo.time.unwrap_or_default());
        match mode {
            "limit" => echo.limit = Some(echo.limit.unwrap_or_default()),
            "viscous" => echo.viscous = Some(echo.viscous.unwrap_or_default()),
            "sweep-eps" => echo.sweep = Some(echo.sweep.unwrap_or_default()),
            "verify" => echo.verify = Some(echo.verify.unwrap_or_default()),
            _ => {}
        }
        echo
    }
}

/// Command-line overrides that mirror config keys.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub family: Option<String>,
    pub n_points: Option<usize>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub t_final: Option<f64>,
    pub n_steps: Option<usize>,
    pub route: Option<String>,
    pub epsilon: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfigFile) {
        if let Some(family) = &self.family {
            cfg.model.get_or_insert_with(Default::default).family = family.clone();
        }
        if self.n_points.is_some() || self.x_min.is_some() || self.x_max.is_some() {
            let grid = cfg.grid.get_or_insert_with(Default::default);
            if let Some(n) = self.n_points {
                grid.n_points = n;
            }
            if let Some(x) = self.x_min {
                grid.x_min = x;
            }
            if let Some(x) = self.x_max {
                grid.x_max = x;
            }
        }
        if self.t_final.is_some() || self.n_steps.is_some() {
            let time = cfg.time.get_or_insert_with(Default::default);
            if let Some(t) = self.t_final {
                time.t_final = t;
            }
            if let Some(n) = self.n_steps {
                time.n_steps = n;
            }
        }
        if let Some(route) = &self.route {
            cfg.limit.get_or_insert_with(Default::default).route = route.clone();
        }
        if let Some(eps) = self.epsilon {
            cfg.viscous.get_or_insert_with(Default::default).epsilon = eps;
        }
    }
}
