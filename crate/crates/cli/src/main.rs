//! `hjc`: runs the constrained Hamilton-Jacobi solvers and grades the
//! diagnostics suite. Exit codes: 0 success, 1 execution or configuration
//! error, 2 a check failed.

mod config;
mod persistence;
mod plots;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{Overrides, RunConfigFile};
use hjc_core::{
    check_assumptions, default_i_samples, diag_suite, optimize_endpoint, run_limit, run_viscous,
    sweep_eps, CheckStatus, DiagnosticsReport, LimitConfig, LimitSolution, MultiplierPath, Route,
    TimeGrid,
};
use persistence::{LoadedRun, Manifest};
use plots::Chart;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "hjc",
    version,
    about = "Constrained Hamilton-Jacobi solver: regularized and limit routes, path reconstruction, diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// TOML configuration file; the flags below override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: the config's output_dir, else ./hjc-out)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG line plots next to the CSV outputs
    #[arg(long)]
    plots: bool,
    /// Reaction model family (satexp, cubicsat)
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n_points: Option<usize>,
    #[arg(long)]
    x_min: Option<f64>,
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    #[arg(long)]
    n_steps: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural assumptions of a reaction model on a grid
    CheckModel {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// March the regularized parabolic problem at a fixed epsilon
    Viscous {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// March a constrained limit route (fd or lax)
    Limit {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        route: Option<String>,
    },
    /// Reconstruct the optimal path ending at (x, t) from a finished run
    Traj {
        /// Directory of a finished limit or viscous run
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        t: f64,
        /// Directory for trajectory.csv (default: current directory)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the route pair plus an epsilon ladder and grade every check
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Epsilon ladder, comma separated (overrides the config)
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
    },
    /// Viscous convergence ladder against a freshly computed limit reference
    SweepEps {
        #[command(flatten)]
        common: CommonArgs,
        /// Epsilon ladder, comma separated (overrides the config)
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
    },
    /// Cross-route diagnostics over two finished limit run directories
    Compare {
        dir_a: PathBuf,
        dir_b: PathBuf,
        /// Directory for report.json (default: current directory)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    // usage errors exit 1 (code 2 is reserved for failed checks);
    // --help and --version exit 0
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {:#}", err);
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::CheckModel { common } => cmd_check_model(common),
        Command::Viscous { common, epsilon } => cmd_viscous(common, epsilon),
        Command::Limit { common, route } => cmd_limit(common, route),
        Command::Traj { from, x, t, out } => cmd_traj(&from, x, t, out),
        Command::Verify { common, eps } => cmd_verify(common, eps),
        Command::SweepEps { common, eps } => cmd_sweep(common, eps),
        Command::Compare { dir_a, dir_b, out } => cmd_compare(&dir_a, &dir_b, out),
    }
}

fn load_config(common: &CommonArgs, route: Option<String>, epsilon: Option<f64>) -> Result<RunConfigFile> {
    let mut cfg = match &common.config {
        Some(path) => RunConfigFile::load(path)?,
        None => RunConfigFile::default(),
    };
    Overrides {
        family: common.family.clone(),
        n_points: common.n_points,
        x_min: common.x_min,
        x_max: common.x_max,
        t_final: common.t_final,
        n_steps: common.n_steps,
        route,
        epsilon,
    }
    .apply(&mut cfg);
    Ok(cfg)
}

fn prepare_out(common: &CommonArgs, cfg: &RunConfigFile) -> Result<PathBuf> {
    let dir = common
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("hjc-out"));
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    Ok(dir)
}

fn cmd_check_model(common: CommonArgs) -> Result<i32> {
    let cfg = load_config(&common, None, None)?;
    cfg.check_mode("check-model")?;
    let model = cfg.resolve_model_spec()?;
    let grid = cfg.resolve_grid()?;
    let report = check_assumptions(&model, grid, &default_i_samples(model.i_max));
    let out = prepare_out(&common, &cfg)?;
    let manifest = Manifest::new("check-model", cfg.resolved_echo("check-model", &out));
    persistence::write_manifest(&out, &manifest)?;
    std::fs::write(
        out.join("assumptions.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    println!("model {} on [{}, {}] with {} nodes", model.family_id.name(), grid.x_min, grid.x_max, grid.n_points);
    for entry in &report.entries {
        let witness = entry
            .witness
            .map(|(x, i)| format!("  witness x={:.4} i={:.4}", x, i))
            .unwrap_or_default();
        println!(
            "  {}  {:?}  bound {:.4e}{}",
            entry.id, entry.status, entry.sampled_bound, witness
        );
    }
    if report.all_pass() {
        println!("all assumptions hold");
        Ok(0)
    } else {
        println!("failing: {:?}", report.failing_ids());
        Ok(2)
    }
}

fn limit_plots(dir: &Path, sol: &LimitSolution) -> Result<()> {
    Chart {
        title: "Lagrange multiplier",
        x_label: "t",
        y_label: "I",
        series: vec![("I(t)".into(), sol.series.iter().map(|r| (r.t, r.i)).collect())],
    }
    .write(&dir.join("multiplier.svg"))?;
    Chart {
        title: "maximum location",
        x_label: "t",
        y_label: "x",
        series: vec![
            (
                "x_max".into(),
                sol.series.iter().map(|r| (r.t, r.x_max)).collect(),
            ),
            (
                "x_zero(I)".into(),
                sol.series.iter().map(|r| (r.t, r.x_zero)).collect(),
            ),
        ],
    }
    .write(&dir.join("argmax.svg"))?;
    Chart {
        title: "field snapshots",
        x_label: "x",
        y_label: "u",
        series: sol
            .snapshots
            .iter()
            .map(|(t, f)| {
                (
                    format!("t={:.2}", t),
                    f.grid.nodes().into_iter().zip(f.values.iter().copied()).collect(),
                )
            })
            .collect(),
    }
    .write(&dir.join("snapshots.svg"))?;
    Ok(())
}

fn cmd_limit(common: CommonArgs, route: Option<String>) -> Result<i32> {
    let cfg = load_config(&common, route, None)?;
    cfg.check_mode("limit")?;
    let lcfg = cfg.resolve_limit()?;
    let out = prepare_out(&common, &cfg)?;
    let started = Instant::now();
    let sol = run_limit(&lcfg)?;
    let mut manifest = Manifest::new("limit", cfg.resolved_echo("limit", &out));
    manifest.wall_seconds = started.elapsed().as_secs_f64();
    manifest.valid = sol.valid;
    manifest.warnings = sol.warnings.clone();
    persistence::write_manifest(&out, &manifest)?;
    persistence::write_limit_series(&out, &sol.series)?;
    persistence::write_snapshots(&out, &sol.snapshots)?;
    if common.plots {
        limit_plots(&out, &sol)?;
    }
    let last = sol.series.last().expect("series nonempty");
    println!(
        "{} route, {} steps: I(T)={:.6}, x_max(T)={:.4}, {} renormalizations, {} warning(s)",
        lcfg.route.name(),
        lcfg.time.n_steps,
        last.i,
        last.x_max,
        sol.renorm.count,
        sol.warnings.len()
    );
    if let Some(reason) = &sol.abort {
        eprintln!("run aborted early: {}", reason);
    }
    println!("artifacts in {}", out.display());
    Ok(if sol.valid { 0 } else { 2 })
}

fn cmd_viscous(common: CommonArgs, epsilon: Option<f64>) -> Result<i32> {
    let cfg = load_config(&common, None, epsilon)?;
    cfg.check_mode("viscous")?;
    let vcfg = cfg.resolve_viscous()?;
    let out = prepare_out(&common, &cfg)?;
    let started = Instant::now();
    let sol = run_viscous(&vcfg)?;
    let mut manifest = Manifest::new("viscous", cfg.resolved_echo("viscous", &out));
    manifest.wall_seconds = started.elapsed().as_secs_f64();
    manifest.valid = sol.valid;
    persistence::write_manifest(&out, &manifest)?;
    persistence::write_viscous_series(&out, &sol.series)?;
    persistence::write_snapshots(&out, &sol.snapshots)?;
    if common.plots {
        Chart {
            title: "regularized multiplier",
            x_label: "t",
            y_label: "I_eps",
            series: vec![(
                format!("eps={}", vcfg.epsilon),
                sol.series.iter().map(|r| (r.t, r.i_eps)).collect(),
            )],
        }
        .write(&out.join("multiplier.svg"))?;
        Chart {
            title: "field snapshots",
            x_label: "x",
            y_label: "u",
            series: sol
                .snapshots
                .iter()
                .map(|(t, f)| {
                    (
                        format!("t={:.2}", t),
                        f.grid.nodes().into_iter().zip(f.values.iter().copied()).collect(),
                    )
                })
                .collect(),
        }
        .write(&out.join("snapshots.svg"))?;
    }
    let last = sol.series.last().expect("series nonempty");
    println!(
        "viscous eps={}: I_eps(T)={:.6}, max u(T)={:.4}",
        vcfg.epsilon, last.i_eps, last.u_max
    );
    if let Some(reason) = &sol.abort {
        eprintln!("run aborted early: {}", reason);
    }
    println!("artifacts in {}", out.display());
    Ok(if sol.valid { 0 } else { 2 })
}

fn cmd_traj(from: &Path, x: f64, t: f64, out: Option<PathBuf>) -> Result<i32> {
    let (_, run) = persistence::load_run(from)?;
    let (model, i_path) = match &run {
        LoadedRun::Limit(sol) => (sol.config.model.clone(), MultiplierPath::from_limit(sol)),
        LoadedRun::Viscous(sol) => (sol.config.model.clone(), MultiplierPath::from_viscous(sol)),
    };
    if t > i_path.horizon() + 1e-9 {
        bail!(
            "requested t={} exceeds the run horizon {}",
            t,
            i_path.horizon()
        );
    }
    let window = (model.domain_hint.0 + 0.1, model.domain_hint.1 - 0.1);
    let scan: Vec<f64> = (0..161)
        .map(|k| window.0 + (window.1 - window.0) * k as f64 / 160.0)
        .collect();
    let outcome = optimize_endpoint(&model, x, t, &i_path, &scan, 800)?;
    let dir = out.unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let traj = &outcome.best;
    let mut csv = String::from("s,gamma,gamma_dot\n");
    for ((s, g), v) in traj
        .times
        .iter()
        .zip(&traj.positions)
        .zip(&traj.velocities)
    {
        csv.push_str(&format!("{:.12e},{:.12e},{:.12e}\n", s, g, v));
    }
    let path = dir.join("trajectory.csv");
    std::fs::write(&path, csv).with_context(|| format!("cannot write {}", path.display()))?;
    println!(
        "path to ({:.4}, {:.4}): starts at {:.6}, action {:.6}, {} branch(es){}",
        x,
        t,
        traj.initial_point,
        traj.action,
        outcome.branches.len(),
        if outcome.tied { ", tied optimum" } else { "" }
    );
    println!("wrote {}", path.display());
    Ok(0)
}

fn print_report(report: &DiagnosticsReport) {
    for entry in &report.entries {
        let status = match entry.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::NotApplicable => "n/a ",
        };
        println!(
            "  {:<24} {}  measured {:>12.6}  tol {:>12.6}  {}",
            entry.name, status, entry.measured, entry.tolerance, entry.detail
        );
    }
    println!(
        "summary: {}",
        if report.summary { "all checks pass" } else { "checks failed" }
    );
}

fn cmd_verify(common: CommonArgs, eps: Option<Vec<f64>>) -> Result<i32> {
    let cfg = load_config(&common, None, None)?;
    cfg.check_mode("verify")?;
    let model = cfg.resolve_model_spec()?;
    let grid = cfg.resolve_grid()?;
    let time = cfg.resolve_time();
    let mut vb = cfg.verify.clone().unwrap_or_default();
    if let Some(ladder) = eps {
        vb.eps_ladder = ladder;
    }
    let fd_steps = vb.fd_steps.unwrap_or(time.n_steps);
    let lax_steps = vb.lax_steps.unwrap_or_else(|| (fd_steps / 20).max(10));
    let out = prepare_out(&common, &cfg)?;
    let started = Instant::now();

    let mut limit_runs = Vec::new();
    for (route, steps) in [(Route::FdMonotone, fd_steps), (Route::LaxOleinik, lax_steps)] {
        let lcfg = LimitConfig {
            model: model.clone(),
            grid,
            time: TimeGrid {
                t_final: time.t_final,
                n_steps: steps,
            },
            route,
            constraint_tol: 1e-10,
            lf_dissipation: hjc_core::LfDissipation::Auto,
            snapshot_stride: (steps / 20).max(1),
        };
        let sol = run_limit(&lcfg).with_context(|| format!("{} route failed", route.name()))?;
        if !sol.valid {
            bail!("{} route aborted: {:?}", route.name(), sol.abort);
        }
        limit_runs.push(sol);
    }
    let mut viscous_runs = Vec::new();
    for &epsilon in &vb.eps_ladder {
        let vcfg = hjc_core::ViscousConfig {
            model: model.clone(),
            grid,
            time: TimeGrid {
                t_final: time.t_final,
                n_steps: fd_steps,
            },
            epsilon,
            cfl: 0.45,
            picard_iters: 2,
            snapshot_stride: (fd_steps / 20).max(1),
        };
        let sol =
            run_viscous(&vcfg).with_context(|| format!("viscous eps={} failed", epsilon))?;
        if !sol.valid {
            bail!("viscous eps={} aborted: {:?}", epsilon, sol.abort);
        }
        viscous_runs.push(sol);
    }
    let report = diag_suite(&viscous_runs, &limit_runs, &model)?;

    let mut manifest = Manifest::new("verify", cfg.resolved_echo("verify", &out));
    manifest.wall_seconds = started.elapsed().as_secs_f64();
    manifest.valid = report.summary;
    persistence::write_manifest(&out, &manifest)?;
    std::fs::write(
        out.join("report.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    println!(
        "verify: fd {} steps, lax {} steps, eps ladder {:?}",
        fd_steps, lax_steps, vb.eps_ladder
    );
    print_report(&report);
    println!("report in {}", out.display());
    Ok(if report.summary { 0 } else { 2 })
}

fn cmd_sweep(common: CommonArgs, eps: Option<Vec<f64>>) -> Result<i32> {
    let cfg = load_config(&common, None, None)?;
    cfg.check_mode("sweep-eps")?;
    let model = cfg.resolve_model_spec()?;
    let grid = cfg.resolve_grid()?;
    let time = cfg.resolve_time();
    let mut sb = cfg.sweep.clone().unwrap_or_default();
    if let Some(ladder) = eps {
        sb.eps_ladder = ladder;
    }
    let route = Route::parse(&sb.route)?;
    let out = prepare_out(&common, &cfg)?;
    let started = Instant::now();
    let lcfg = LimitConfig {
        model: model.clone(),
        grid,
        time,
        route,
        constraint_tol: 1e-10,
        lf_dissipation: hjc_core::LfDissipation::Auto,
        snapshot_stride: (time.n_steps / 20).max(1),
    };
    let reference = run_limit(&lcfg).context("limit reference failed")?;
    if !reference.valid {
        bail!("limit reference aborted: {:?}", reference.abort);
    }
    let table = sweep_eps(&model, grid, time, &sb.eps_ladder, &reference)?;
    let mut csv = String::from("eps,e_i,e_u,ratio\n");
    for row in &table.rows {
        csv.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{}\n",
            row.eps,
            row.e_i,
            row.e_u,
            row.ratio
                .map(|r| format!("{:.12e}", r))
                .unwrap_or_else(|| "NaN".into()),
        ));
    }
    std::fs::write(out.join("sweep.csv"), csv)
        .with_context(|| format!("cannot write sweep table in {}", out.display()))?;
    let mut manifest = Manifest::new("sweep-eps", cfg.resolved_echo("sweep-eps", &out));
    manifest.wall_seconds = started.elapsed().as_secs_f64();
    persistence::write_manifest(&out, &manifest)?;
    println!("eps      e_I          e_u          ratio");
    for row in &table.rows {
        println!(
            "{:<8} {:<12.6} {:<12.6} {}",
            row.eps,
            row.e_i,
            row.e_u,
            row.ratio.map(|r| format!("{:.4}", r)).unwrap_or_else(|| "-".into())
        );
    }
    println!("table in {}", out.display());
    Ok(0)
}

fn cmd_compare(dir_a: &Path, dir_b: &Path, out: Option<PathBuf>) -> Result<i32> {
    let (_, run_a) = persistence::load_run(dir_a)?;
    let (_, run_b) = persistence::load_run(dir_b)?;
    let (LoadedRun::Limit(a), LoadedRun::Limit(b)) = (run_a, run_b) else {
        bail!("compare expects two limit run directories");
    };
    let model = a.config.model.clone();
    let report = diag_suite(&[], &[a, b], &model)?;
    let dir = out.unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    std::fs::write(
        dir.join("report.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    println!("compare {} vs {}", dir_a.display(), dir_b.display());
    print_report(&report);
    Ok(if report.summary { 0 } else { 2 })
}
