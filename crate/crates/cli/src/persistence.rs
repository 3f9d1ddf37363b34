//! Run-directory artifacts: manifest, series, snapshots, reports, and the
//! loader that reconstructs a finished run from them.
//!
//! Numeric CSV cells are written with a fixed `{:.12e}` format so repeated
//! runs of the same configuration produce byte-identical files. Wall time
//! lives only in the manifest, which is excluded from that guarantee.

use crate::config::RunConfigFile;
use anyhow::{bail, Context, Result};
use hjc_core::{
    LimitSample, LimitSolution, RenormStats, SampledFunction, ViscousSample, ViscousSolution,
};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub mode: String,
    pub wall_seconds: f64,
    pub valid: bool,
    pub warnings: Vec<String>,
    /// Fully resolved configuration; re-running it reproduces the outputs.
    pub config: RunConfigFile,
}

impl Manifest {
    pub fn new(mode: &str, config: RunConfigFile) -> Self {
        Manifest {
            tool: "hjc".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            mode: mode.into(),
            wall_seconds: 0.0,
            valid: true,
            warnings: Vec::new(),
            config,
        }
    }
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest)?;
    fs::write(dir.join("manifest.json"), text + "\n")
        .with_context(|| format!("cannot write manifest in {}", dir.display()))?;
    let echo = toml::to_string_pretty(&manifest.config)?;
    fs::write(dir.join("effective_config.toml"), echo)
        .with_context(|| format!("cannot write config echo in {}", dir.display()))?;
    Ok(())
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("invalid manifest {}", path.display()))
}

pub const LIMIT_COLUMNS: &str = "t,i,x_max,x_zero,max_u,semiconvexity_min";
pub const VISCOUS_COLUMNS: &str = "t,i_eps,x_max,u_max,semiconvexity_min";

fn cell(v: f64) -> String {
    format!("{:.12e}", v)
}

pub fn write_limit_series(dir: &Path, series: &[LimitSample]) -> Result<()> {
    let mut out = String::with_capacity(series.len() * 96 + 64);
    out.push_str(LIMIT_COLUMNS);
    out.push('\n');
    for row in series {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            cell(row.t),
            cell(row.i),
            cell(row.x_max),
            cell(row.x_zero),
            cell(row.max_u),
            cell(row.semiconvexity_min),
        ));
    }
    fs::write(dir.join("series.csv"), out)
        .with_context(|| format!("cannot write series in {}", dir.display()))
}

pub fn write_viscous_series(dir: &Path, series: &[ViscousSample]) -> Result<()> {
    let mut out = String::with_capacity(series.len() * 80 + 64);
    out.push_str(VISCOUS_COLUMNS);
    out.push('\n');
    for row in series {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            cell(row.t),
            cell(row.i_eps),
            cell(row.x_max),
            cell(row.u_max),
            cell(row.semiconvexity_min),
        ));
    }
    fs::write(dir.join("series.csv"), out)
        .with_context(|| format!("cannot write series in {}", dir.display()))
}

#[derive(Serialize, Deserialize)]
struct SnapshotLine {
    t: f64,
    values: Vec<f64>,
}

pub fn write_snapshots(dir: &Path, snapshots: &[(f64, SampledFunction)]) -> Result<()> {
    let mut out = String::new();
    for (t, field) in snapshots {
        out.push_str(&serde_json::to_string(&SnapshotLine {
            t: *t,
            values: field.values.clone(),
        })?);
        out.push('\n');
    }
    fs::write(dir.join("snapshots.ndjson"), out)
        .with_context(|| format!("cannot write snapshots in {}", dir.display()))
}

fn parse_series_line(line: &str, columns: usize, path: &Path) -> Result<Vec<f64>> {
    let cells: Vec<&str> = line.split(',').collect();
    if cells.len() != columns {
        bail!(
            "{}: expected {} columns, found {}",
            path.display(),
            columns,
            cells.len()
        );
    }
    cells
        .iter()
        .map(|c| {
            c.parse::<f64>()
                .with_context(|| format!("{}: bad number {:?}", path.display(), c))
        })
        .collect()
}

pub fn read_limit_series(dir: &Path) -> Result<Vec<LimitSample>> {
    let path = dir.join("series.csv");
    let text = fs::read_to_string(&path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == LIMIT_COLUMNS => {}
        other => bail!("{}: not a limit series (header {:?})", path.display(), other),
    }
    lines
        .map(|line| {
            let v = parse_series_line(line, 6, &path)?;
            Ok(LimitSample {
                t: v[0],
                i: v[1],
                x_max: v[2],
                x_zero: v[3],
                max_u: v[4],
                semiconvexity_min: v[5],
            })
        })
        .collect()
}

pub fn read_viscous_series(dir: &Path) -> Result<Vec<ViscousSample>> {
    let path = dir.join("series.csv");
    let text = fs::read_to_string(&path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == VISCOUS_COLUMNS => {}
        other => bail!("{}: not a viscous series (header {:?})", path.display(), other),
    }
    lines
        .map(|line| {
            let v = parse_series_line(line, 5, &path)?;
            Ok(ViscousSample {
                t: v[0],
                i_eps: v[1],
                x_max: v[2],
                u_max: v[3],
                semiconvexity_min: v[4],
            })
        })
        .collect()
}

pub fn read_snapshots(
    dir: &Path,
    grid: hjc_core::Grid1D,
) -> Result<Vec<(f64, SampledFunction)>> {
    let path = dir.join("snapshots.ndjson");
    let text = fs::read_to_string(&path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut out = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let snap: SnapshotLine =
            serde_json::from_str(line).with_context(|| format!("invalid snapshot line in {}", path.display()))?;
        out.push((snap.t, SampledFunction::new(grid, snap.values)?));
    }
    Ok(out)
}

pub enum LoadedRun {
    Limit(LimitSolution),
    Viscous(ViscousSolution),
}

/// Reconstruct a finished run from its directory. Renormalization counters
/// are not persisted; the loaded run reports them as zero.
pub fn load_run(dir: &Path) -> Result<(Manifest, LoadedRun)> {
    let manifest = read_manifest(dir)?;
    let run = match manifest.mode.as_str() {
        "limit" => {
            let config = manifest.config.resolve_limit()?;
            let series = read_limit_series(dir)?;
            let snapshots = read_snapshots(dir, config.grid)?;
            if series.is_empty() {
                bail!("{}: empty series", dir.display());
            }
            LoadedRun::Limit(LimitSolution {
                config,
                snapshots,
                series,
                renorm: RenormStats::default(),
                warnings: manifest.warnings.clone(),
                valid: manifest.valid,
                abort: None,
            })
        }
        "viscous" => {
            let config = manifest.config.resolve_viscous()?;
            let series = read_viscous_series(dir)?;
            let snapshots = read_snapshots(dir, config.grid)?;
            if series.is_empty() {
                bail!("{}: empty series", dir.display());
            }
            LoadedRun::Viscous(ViscousSolution {
                config,
                snapshots,
                series,
                valid: manifest.valid,
                abort: None,
            })
        }
        other => bail!(
            "{}: mode {:?} does not produce a loadable run",
            dir.display(),
            other
        ),
    };
    Ok((manifest, run))
}

#[cfg(test)]
mod tests {
    use super::*;
    use hjc_core::{Grid1D, LimitConfig, ModelSpec, FamilyId, Route, TimeGrid, run_limit};

    #[test]
    fn limit_series_round_trips_including_nan() {
        let dir = tempfile::tempdir().unwrap();
        let series = vec![
            LimitSample {
                t: 0.0,
                i: 0.0,
                x_max: 0.5,
                x_zero: f64::NAN,
                max_u: 0.0,
                semiconvexity_min: -2.0,
            },
            LimitSample {
                t: 0.1,
                i: 0.25,
                x_max: 0.75,
                x_zero: 0.8,
                max_u: -1e-12,
                semiconvexity_min: -2.1,
            },
        ];
        write_limit_series(dir.path(), &series).unwrap();
        let back = read_limit_series(dir.path()).unwrap();
        assert_eq!(back.len(), 2);
        assert!(back[0].x_zero.is_nan());
        assert_eq!(back[1].i, 0.25);
        assert_eq!(back[1].max_u, -1e-12);
    }

    #[test]
    fn full_limit_run_round_trips_through_a_directory() {
        let model = ModelSpec::builtin(FamilyId::Satexp);
        let cfg = LimitConfig {
            model,
            grid: Grid1D::new(-5.0, 15.0, 201).unwrap(),
            time: TimeGrid {
                t_final: 0.2,
                n_steps: 40,
            },
            route: Route::FdMonotone,
            constraint_tol: 1e-10,
            lf_dissipation: hjc_core::LfDissipation::Auto,
            snapshot_stride: 10,
        };
        let sol = run_limit(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let file = RunConfigFile {
            grid: Some(crate::config::GridBlock {
                x_min: -5.0,
                x_max: 15.0,
                n_points: 201,
            }),
            time: Some(crate::config::TimeBlock {
                t_final: 0.2,
                n_steps: 40,
            }),
            limit: Some(crate::config::LimitBlock {
                snapshot_stride: Some(10),
                ..Default::default()
            }),
            ..Default::default()
        };
        let mut manifest = Manifest::new("limit", file.resolved_echo("limit", dir.path()));
        manifest.warnings = sol.warnings.clone();
        write_manifest(dir.path(), &manifest).unwrap();
        write_limit_series(dir.path(), &sol.series).unwrap();
        write_snapshots(dir.path(), &sol.snapshots).unwrap();

        let (back_manifest, run) = load_run(dir.path()).unwrap();
        assert_eq!(back_manifest.mode, "limit");
        let LoadedRun::Limit(back) = run else {
            panic!("expected a limit run");
        };
        assert_eq!(back.series.len(), sol.series.len());
        assert_eq!(back.snapshots.len(), sol.snapshots.len());
        assert_eq!(back.series.last().unwrap().i, sol.series.last().unwrap().i);
        assert_eq!(back.config.route, Route::FdMonotone);
    }
}
