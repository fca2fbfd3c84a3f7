//! The `bubbles` command line: one subcommand per verification pipeline.
//!
//! Every run writes one JSON report (to `--out` or stdout) and optionally a CSV
//! next to it. Exit status: 0 when all checks pass, 1 when a check fails,
//! 2 on bad input. Errors go to stderr as `{"error_code": …, "detail": …}`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bubble::{boundary_residual_relative, interior_residual_relative, solve_betas, BubbleParams, Y0Report, DEFAULT_TOL_PARAM};
use crate::bubble::{y0n_rows, DEFAULT_TOL_SOLVE};
use crate::conformal::{
    alpha_condition_residuals, ball_samples, ball_system_residual, recover_mu_alpha, verify_radial, verify_t_properties, BallField, ConformalSetup,
};
use crate::error::{Error, Result};
use crate::exponent_system::{validate_spec, EllipticSystemSpec, DEFAULT_TOL_ROW};
use crate::fd::{convergence_order, fit_log_slope, residual_sweep_with_points, BoxRegion, SlopeFit};
use crate::field::Field;
use crate::fixtures;
use crate::geometry::{add_scaled, dist};
use crate::kelvin::{critical_lambda_exact, min_w_at, standard_sweep_samples, sweep_moving_spheres};
use crate::ode::{closed_form_psi, halfline_breakdown, integrate_radial, shoot_robin, write_trajectory_csv};
use crate::report::to_json_string;
use crate::samples;

#[derive(Debug, Parser)]
#[command(
    name = "bubbles",
    version,
    about = "Bubble solutions of critical elliptic systems on the half-space: construction and numerical checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Validate,
    SolveParams,
    Verify,
    MovingSpheres,
    Ball,
    Radial,
    Halfline,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the exponent structure of a system spec.
    Validate(Flags),
    /// Solve for (β, y⁰) at a given σ; reports the kernel family when rank-deficient.
    SolveParams(Flags),
    /// Analytic and finite-difference residuals on a box, with convergence slopes.
    Verify(Flags),
    /// Sweep the sphere radius at a boundary center --x and locate the critical radius.
    MovingSpheres(Flags),
    /// Inversion onto the ball: mapping properties, radial symmetry, ball residuals, (μ, α).
    Ball(Flags),
    /// Radial ODE against the closed form, and Robin shooting.
    Radial(Flags),
    /// Positivity breakdown of the one-dimensional system from --u0.
    Halfline(Flags),
}

impl Command {
    fn split(self) -> (CommandKind, Flags) {
        match self {
            Command::Validate(f) => (CommandKind::Validate, f),
            Command::SolveParams(f) => (CommandKind::SolveParams, f),
            Command::Verify(f) => (CommandKind::Verify, f),
            Command::MovingSpheres(f) => (CommandKind::MovingSpheres, f),
            Command::Ball(f) => (CommandKind::Ball, f),
            Command::Radial(f) => (CommandKind::Radial, f),
            Command::Halfline(f) => (CommandKind::Halfline, f),
        }
    }
}

/// Flags shared by all subcommands. A `--config` JSON file with the same
/// (snake_case) keys fills in anything not given on the command line.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Flags {
    /// System spec JSON {"N", "m", "A", "B", "c"}.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Built-in fixture instead of --spec (n3-m1-c0, n3-m1-cneg, n4-m2-sym, n4-m2-degenerate).
    #[arg(long)]
    pub fixture: Option<String>,
    /// BubbleParams JSON {"sigma", "betas", "y0"}; solved from the spec when absent.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Boundary point, comma separated (solve-params: tangential part of y⁰).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<f64>>,
    /// Box bounds `lo1,hi1,lo2,hi2,...`.
    #[arg(long = "box", value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(rename = "box")]
    pub box_bounds: Option<Vec<f64>>,
    /// Lattice points per axis (verify) or sample count (ball).
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a CSV next to --out.
    #[arg(long)]
    pub csv: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Initial values for halfline, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub u0: Option<Vec<f64>>,
    /// Radius range `lo,hi` for moving-spheres.
    #[arg(long, value_delimiter = ',')]
    pub lambda_range: Option<Vec<f64>>,
}

impl Flags {
    /// Fills unset fields from `base`; flags already set win.
    pub fn merged_over(self, base: Flags) -> Flags {
        Flags {
            spec: self.spec.or(base.spec),
            fixture: self.fixture.or(base.fixture),
            params: self.params.or(base.params),
            sigma: self.sigma.or(base.sigma),
            x: self.x.or(base.x),
            box_bounds: self.box_bounds.or(base.box_bounds),
            grid: self.grid.or(base.grid),
            h: self.h.or(base.h),
            tol: self.tol.or(base.tol),
            out: self.out.or(base.out),
            csv: self.csv || base.csv,
            config: self.config,
            u0: self.u0.or(base.u0),
            lambda_range: self.lambda_range.or(base.lambda_range),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub flags: Flags,
}

impl RunConfig {
    /// Resolves `--config` and checks the flag values.
    pub fn from_command(command: Command) -> Result<Self> {
        let (kind, mut flags) = command.split();
        if let Some(path) = flags.config.clone() {
            let text = std::fs::read_to_string(&path)?;
            let base: Flags = serde_json::from_str(&text)?;
            flags = flags.merged_over(base);
        }
        let cfg = RunConfig { command: kind, flags };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        let f = &self.flags;
        for (name, v) in [("sigma", f.sigma), ("h", f.h), ("tol", f.tol)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::InvalidArgument(format!("--{name} must be positive, got {v}")));
                }
            }
        }
        if f.spec.is_some() && f.fixture.is_some() {
            return Err(Error::InvalidArgument("give either --spec or --fixture, not both".into()));
        }
        if f.csv && f.out.is_none() {
            return Err(Error::InvalidArgument("--csv needs --out".into()));
        }
        for p in [&f.spec, &f.params].into_iter().flatten() {
            if !p.exists() {
                return Err(Error::InvalidArgument(format!("no such file: {}", p.display())));
            }
        }
        Ok(())
    }
}

/// A finished run: the JSON report, an optional CSV, and the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub report: Value,
    pub csv: Option<String>,
}

/// Parses `args` (including the program name), runs, writes outputs and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let _ = e.print();
                return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                    2
                } else {
                    0
                };
            }
            emit_error("Usage", &e.to_string());
            return 2;
        }
    };
    let result = RunConfig::from_command(cli.command).and_then(|cfg| {
        let outcome = run(&cfg)?;
        write_outputs(&cfg, &outcome)?;
        Ok(outcome)
    });
    match result {
        Ok(o) => i32::from(!o.passed),
        Err(e) => {
            emit_error(e.code(), &e.to_string());
            if e.is_input_error() {
                2
            } else {
                1
            }
        }
    }
}

fn emit_error(code: &str, detail: &str) {
    let obj = json!({ "error_code": code, "detail": detail.trim_end() });
    eprintln!("{}", serde_json::to_string(&obj).expect("error json"));
}

fn write_outputs(cfg: &RunConfig, outcome: &Outcome) -> Result<()> {
    let text = to_json_string(&outcome.report)?;
    match &cfg.flags.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    if cfg.flags.csv {
        if let (Some(out), Some(csv)) = (&cfg.flags.out, &outcome.csv) {
            std::fs::write(csv_path(out), csv)?;
        }
    }
    Ok(())
}

/// `report.json` → `report.csv`.
pub fn csv_path(out: &Path) -> PathBuf {
    out.with_extension("csv")
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        CommandKind::Validate => run_validate(&cfg.flags),
        CommandKind::SolveParams => run_solve_params(&cfg.flags),
        CommandKind::Verify => run_verify(&cfg.flags),
        CommandKind::MovingSpheres => run_moving_spheres(&cfg.flags),
        CommandKind::Ball => run_ball(&cfg.flags),
        CommandKind::Radial => run_radial(&cfg.flags),
        CommandKind::Halfline => run_halfline(&cfg.flags),
    }
}

fn load_spec(f: &Flags) -> Result<(EllipticSystemSpec, Option<f64>)> {
    match (&f.spec, &f.fixture) {
        (Some(p), _) => Ok((EllipticSystemSpec::from_json_file(p)?, None)),
        (None, Some(name)) => {
            let fx = fixtures::by_name(name).ok_or_else(|| Error::InvalidArgument(format!("unknown fixture {name}")))?;
            Ok((fx.spec, Some(fx.sigma)))
        }
        (None, None) => Err(Error::InvalidArgument("--spec or --fixture is required".into())),
    }
}

fn load_params(f: &Flags, spec: &EllipticSystemSpec, default_sigma: Option<f64>) -> Result<BubbleParams> {
    let p = match &f.params {
        Some(path) => BubbleParams::from_json_file(path)?,
        None => BubbleParams::from_spec(spec, f.sigma.or(default_sigma).unwrap_or(1.0), None)?,
    };
    if p.y0.len() != spec.n || p.betas.len() != spec.m {
        return Err(Error::InvalidArgument(format!(
            "params have N={} m={}, spec has N={} m={}",
            p.y0.len(),
            p.betas.len(),
            spec.n,
            spec.m
        )));
    }
    Ok(p)
}

fn point_arg(v: &Option<Vec<f64>>, n: usize, name: &str) -> Result<Option<Vec<f64>>> {
    match v {
        None => Ok(None),
        Some(x) if x.len() == n && x.iter().all(|c| c.is_finite()) => Ok(Some(x.clone())),
        Some(x) => Err(Error::InvalidArgument(format!("--{name} needs {n} finite values, got {}", x.len()))),
    }
}

fn run_validate(f: &Flags) -> Result<Outcome> {
    let (spec, _) = load_spec(f)?;
    let report = validate_spec(&spec, f.tol.unwrap_or(DEFAULT_TOL_ROW))?;
    Ok(Outcome {
        passed: report.passed,
        report: serde_json::to_value(&report)?,
        csv: None,
    })
}

#[derive(Serialize)]
struct SolveParamsReport {
    sigma: f64,
    betas: Vec<f64>,
    y0: Vec<f64>,
    log_betas_particular: Vec<f64>,
    nullity: usize,
    null_basis: Vec<Vec<f64>>,
    left_null_residual: f64,
    y0n: Y0Report,
    identity_residual: f64,
    spec_valid: bool,
}

fn run_solve_params(f: &Flags) -> Result<Outcome> {
    let (spec, default_sigma) = load_spec(f)?;
    let sigma = f.sigma.or(default_sigma).unwrap_or(1.0);
    let tangential = point_arg(&f.x, spec.n - 1, "x")?;
    let sol = solve_betas(&spec, sigma, f.tol.unwrap_or(DEFAULT_TOL_SOLVE))?;
    let params = BubbleParams::from_spec(&spec, sigma, tangential.as_deref())?;
    let y0n = y0n_rows(&spec, &params.betas, sigma);
    let identity_residual = params.identity_residuals(&spec)?.max_abs();
    let spec_valid = validate_spec(&spec, DEFAULT_TOL_ROW)?.passed;
    let report = SolveParamsReport {
        sigma,
        betas: params.betas.clone(),
        y0: params.y0.clone(),
        log_betas_particular: sol.log_betas_particular,
        nullity: sol.nullity,
        null_basis: sol.null_basis,
        left_null_residual: sol.left_null_residual,
        y0n,
        identity_residual,
        spec_valid,
    };
    let passed = spec_valid && identity_residual <= DEFAULT_TOL_PARAM;
    Ok(Outcome {
        passed,
        report: serde_json::to_value(&report)?,
        csv: None,
    })
}

fn default_box(n: usize) -> BoxRegion {
    let mut lo = vec![-2.0; n];
    let mut hi = vec![2.0; n];
    lo[n - 1] = 0.0;
    hi[n - 1] = 2.0;
    BoxRegion { lo, hi }
}

fn slope_ok(s: &SlopeFit, boundary: bool) -> bool {
    match s {
        SlopeFit::Degenerate { .. } => true,
        // the one-sided stencil is third order at boundary points where the
        // field is even in y_N, so only a lower bound applies there
        SlopeFit::Fitted { slope } if boundary => *slope >= 1.9,
        SlopeFit::Fitted { slope } => (slope - 2.0).abs() <= 0.1,
    }
}

fn run_verify(f: &Flags) -> Result<Outcome> {
    let (spec, default_sigma) = load_spec(f)?;
    let params = load_params(f, &spec, default_sigma)?;
    let n = spec.n;
    let region = match &f.box_bounds {
        None => default_box(n),
        Some(b) if b.len() == 2 * n => BoxRegion::new(b.iter().step_by(2).copied().collect(), b.iter().skip(1).step_by(2).copied().collect())?,
        Some(b) => return Err(Error::InvalidArgument(format!("--box needs {} values, got {}", 2 * n, b.len()))),
    };
    let grid = f.grid.unwrap_or(if n <= 3 { 9 } else { 5 });
    let h = f.h.unwrap_or_else(|| region.default_h());
    let tol = f.tol.unwrap_or(1e-12);

    let mut analytic_interior: f64 = 0.0;
    for y in region.interior_lattice(grid) {
        analytic_interior = interior_residual_relative(&spec, &params, &y)
            .into_iter()
            .fold(analytic_interior, |a, r| a.max(r.abs()));
    }
    let mut analytic_boundary: f64 = 0.0;
    for y in region.boundary_lattice(grid) {
        analytic_boundary = boundary_residual_relative(&spec, &params, &y)
            .into_iter()
            .fold(analytic_boundary, |a, r| a.max(r.abs()));
    }
    let fd = residual_sweep_with_points(&spec, &params, &region, grid, h)?;
    let conv = convergence_order(&spec, &params, &region, grid, &[4.0 * h, 2.0 * h, h])?;
    let order_ok = conv.interior_slopes.iter().all(|s| slope_ok(s, false)) && conv.boundary_slopes.iter().all(|s| slope_ok(s, true));
    let passed = analytic_interior <= tol && analytic_boundary <= tol && order_ok;

    let csv = {
        let mut buf = Vec::new();
        fd.write_points_csv(&mut buf)?;
        Some(String::from_utf8(buf).expect("csv is utf-8"))
    };
    let mut fd_report = fd;
    fd_report.points = None;
    let report = json!({
        "params": params,
        "box": region,
        "grid": grid,
        "analytic": { "max_interior_relative": analytic_interior, "max_boundary_relative": analytic_boundary, "tol": tol },
        "fd": fd_report,
        "convergence": conv,
        "order_ok": order_ok,
        "passed": passed,
    });
    Ok(Outcome { passed, report, csv })
}

fn run_moving_spheres(f: &Flags) -> Result<Outcome> {
    let (spec, default_sigma) = load_spec(f)?;
    let params = load_params(f, &spec, default_sigma)?;
    let n = spec.n;
    let x = point_arg(&f.x, n, "x")?.unwrap_or_else(|| vec![0.0; n]);
    let scale = params.boundary_scale_sq().sqrt() + dist(&x, &params.boundary_center());
    let (lo, hi) = match &f.lambda_range {
        None => (0.1 * scale, 10.0 * scale),
        Some(r) if r.len() == 2 => (r[0], r[1]),
        Some(_) => return Err(Error::InvalidArgument("--lambda-range needs lo,hi".into())),
    };
    let tol = f.tol.unwrap_or(1e-6);
    let samples = standard_sweep_samples(&x, 1e-3 * scale, scale);
    let sweep = sweep_moving_spheres(&params, &x, &samples, lo, hi, f.grid.unwrap_or(40), None)?;
    let exact = critical_lambda_exact(&params, &x);
    let rel = sweep.lambda_critical_numeric.map(|l| (l - exact).abs() / exact);
    let below = min_w_at(&params, &x, &samples, 0.9 * exact)?;
    let above = min_w_at(&params, &x, &samples, 1.1 * exact)?;
    let sign_ok = below.iter().all(|w| *w >= -sweep.tol_w) && above.iter().all(|w| *w < -sweep.tol_w);
    let passed = rel.is_some_and(|r| r <= tol) && sign_ok;

    let mut buf = Vec::new();
    sweep.write_csv(&mut buf)?;
    let report = json!({
        "x": x,
        "lambda_range": [lo, hi],
        "n_samples": samples.len(),
        "lambda_critical_numeric": sweep.lambda_critical_numeric,
        "lambda_critical_exact": exact,
        "relative_error": rel,
        "bracket": [sweep.bracket.0, sweep.bracket.1],
        "tol_w": sweep.tol_w,
        "min_w_at_0.9": below,
        "min_w_at_1.1": above,
        "sign_pattern_ok": sign_ok,
        "tol": tol,
        "passed": passed,
    });
    Ok(Outcome {
        passed,
        report,
        csv: Some(String::from_utf8(buf).expect("csv is utf-8")),
    })
}

/// Uniform samples in `[−20, 20]^{N−1} × [1e−3, 30]`.
pub fn half_space_samples(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut lo = vec![-20.0; n];
    let mut hi = vec![20.0; n];
    lo[n - 1] = 1e-3;
    hi[n - 1] = 30.0;
    samples::box_points(&lo, &hi, count, seed)
}

/// `0`, `e_1` and `3e_1 + 4e_2`: the default boundary centers.
pub fn default_centers(n: usize) -> Vec<Vec<f64>> {
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let mut x3 = vec![0.0; n];
    x3[0] = 3.0;
    x3[1] = 4.0;
    vec![vec![0.0; n], e1, x3]
}

/// Largest relative gap between `v` and the closed-form profile on `count`
/// points at radii `(k + ½)·2d/count` about `Q`.
pub fn closed_form_gap<F: Field>(setup: &ConformalSetup, v: &F, alphas: &[f64], mu: f64, count: usize, seed: u64) -> f64 {
    let n = setup.dim();
    let mut worst: f64 = 0.0;
    for (k, dir) in samples::sphere_directions(n, count, seed).iter().enumerate() {
        let r = 2.0 * setup.d * (k as f64 + 0.5) / count as f64;
        let z = add_scaled(&setup.q, r, dir);
        for (a, b) in v.eval(&z).iter().zip(closed_form_psi(n, alphas, mu, r)) {
            worst = worst.max((a - b).abs() / b);
        }
    }
    worst
}

fn run_ball(f: &Flags) -> Result<Outcome> {
    let (spec, default_sigma) = load_spec(f)?;
    let params = load_params(f, &spec, default_sigma)?;
    let n = spec.n;
    let setup = ConformalSetup::from_params(&params)?;
    let d = setup.d;
    let tol = f.tol.unwrap_or(1e-10);
    let xs = match point_arg(&f.x, n, "x")? {
        Some(x) => vec![x],
        None => default_centers(n),
    };
    let ys = half_space_samples(n, f.grid.unwrap_or(10_000), samples::DEFAULT_SEED);
    let props = verify_t_properties(&setup, &xs, &ys)?;

    let radii: Vec<f64> = (1..=9).map(|k| 0.2 * k as f64 * d).collect();
    let v = BallField {
        inner: &params,
        setup: setup.clone(),
    };
    let radial = verify_radial(&setup, &v, &radii, 200)?;
    let radial_max = radial.iter().copied().fold(0.0, f64::max);

    let h = f.h.unwrap_or(5e-3 * d);
    let (interior, boundary) = ball_samples(&setup, 200, 200, (0.15 * d).max(25.0 * h), samples::DEFAULT_SEED);
    let hs = [8.0 * h, 4.0 * h, 2.0 * h, h];
    let reports = hs
        .iter()
        .map(|&hh| ball_system_residual(&spec, &setup, &v, &interior, &boundary, hh))
        .collect::<Result<Vec<_>>>()?;
    let interior_slope = fit_log_slope(&hs, &reports.iter().map(|r| r.max_interior()).collect::<Vec<_>>(), 0.0);
    let boundary_slope = fit_log_slope(&hs, &reports.iter().map(|r| r.max_boundary()).collect::<Vec<_>>(), 0.0);

    let ma = recover_mu_alpha(&setup, &params)?;
    let alpha_res = alpha_condition_residuals(&spec, &ma.alphas, ma.mu)
        .into_iter()
        .fold(0.0f64, |a, r| a.max(r.abs()));
    let gap = closed_form_gap(&setup, &v, &ma.alphas, ma.mu, 100, samples::DEFAULT_SEED);

    let passed =
        props.passed && radial_max <= tol && slope_ok(&interior_slope, false) && slope_ok(&boundary_slope, true) && alpha_res <= tol && gap <= tol;
    let report = json!({
        "setup": setup,
        "t_properties": props,
        "radial_variation": { "radii": radii, "max_relative": radial },
        "ball_residual": reports.last(),
        "ball_convergence": { "h_list": hs, "interior_slope": interior_slope, "boundary_slope": boundary_slope },
        "mu_alpha": ma,
        "alpha_condition_residual": alpha_res,
        "closed_form_gap": gap,
        "tol": tol,
        "passed": passed,
    });
    Ok(Outcome { passed, report, csv: None })
}

fn run_radial(f: &Flags) -> Result<Outcome> {
    let (spec, default_sigma) = load_spec(f)?;
    let params = load_params(f, &spec, default_sigma)?;
    let setup = ConformalSetup::from_params(&params)?;
    let ma = recover_mu_alpha(&setup, &params)?;
    let tol = f.tol.unwrap_or(1e-10);
    let r_end = 2.0 * setup.d;
    let psi0 = closed_form_psi(spec.n, &ma.alphas, ma.mu, 0.0);

    let mut tols = vec![1e-6, 1e-8, tol];
    tols.sort_by(|a, b| b.total_cmp(a));
    tols.dedup();
    let mut table = Vec::new();
    let mut final_traj = Vec::new();
    let mut final_err = f64::NAN;
    for &t in &tols {
        let traj = integrate_radial(&spec, &psi0, r_end, t)?;
        let err = traj
            .iter()
            .flat_map(|s| {
                s.psi
                    .iter()
                    .zip(closed_form_psi(spec.n, &ma.alphas, ma.mu, s.r))
                    .map(|(a, b)| (a - b).abs() / b)
                    .collect::<Vec<_>>()
            })
            .fold(0.0f64, f64::max);
        table.push(json!({ "tol": t, "steps": traj.len() - 1, "max_relative_error": err }));
        if t == tol {
            final_traj = traj;
            final_err = err;
        }
    }
    let shot = shoot_robin(&spec, setup.d, 1e-10, None)?;
    let mu_gap = (shot.mu - ma.mu).abs() / ma.mu;
    let alpha_gap = shot.alphas.iter().zip(&ma.alphas).map(|(a, b)| (a - b).abs() / b).fold(0.0f64, f64::max);
    let passed = final_err <= (100.0 * tol).max(1e-8) && mu_gap <= 1e-8 && alpha_gap <= 1e-8;

    let mut buf = Vec::new();
    write_trajectory_csv(&final_traj, &mut buf)?;
    let report = json!({
        "d": setup.d,
        "closed_form": ma,
        "error_table": table,
        "shooting": shot,
        "shooting_mu_relative_gap": mu_gap,
        "shooting_alpha_relative_gap": alpha_gap,
        "passed": passed,
    });
    Ok(Outcome {
        passed,
        report,
        csv: Some(String::from_utf8(buf).expect("csv is utf-8")),
    })
}

fn run_halfline(f: &Flags) -> Result<Outcome> {
    let (spec, _) = load_spec(f)?;
    let u0 = match &f.u0 {
        Some(u) => u.clone(),
        None => vec![1.0; spec.m],
    };
    let cert = halfline_breakdown(&spec, &u0, f.tol.unwrap_or(1e-12))?;
    let passed = cert.is_consistent() && cert.slopes_strictly_decreasing();
    let mut buf = Vec::new();
    cert.write_csv(&mut buf)?;
    let report = json!({
        "u0": u0,
        "certificate": cert,
        "slopes_strictly_decreasing": cert.slopes_strictly_decreasing(),
        "passed": passed,
    });
    Ok(Outcome {
        passed,
        report,
        csv: Some(String::from_utf8(buf).expect("csv is utf-8")),
    })
}
