use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use std::io::Write;

use super::rk::{integrate, Control, RkOptions};
use super::signed_pow_product;
use crate::bubble::{solve_betas, DEFAULT_TOL_SOLVE};
use crate::error::{Error, Result};
use crate::exponent_system::EllipticSystemSpec;
use crate::geometry::power_product;
use crate::lm::{fd_jacobian, minimize, LmOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialState {
    pub r: f64,
    pub psi: Vec<f64>,
    pub dpsi: Vec<f64>,
}

/// `r_s = (tol · 2N / max_i Φ_i)^{1/4}`, capped at `1e−3 · r_end`.
pub fn launch_radius(n: usize, phi0: &[f64], r_end: f64, tol: f64) -> f64 {
    let phi_max = phi0.iter().copied().fold(0.0, f64::max);
    let rs = if phi_max > 0.0 {
        (tol * 2.0 * n as f64 / phi_max).powf(0.25)
    } else {
        f64::INFINITY
    };
    rs.min(1e-3 * r_end)
}

/// Integrates `ψ_i″ + (N−1)/r ψ_i′ + Π_j ψ_j^{a_ij} = 0`, `ψ′(0) = 0`, from
/// `r = 0` to `r_end`. The trajectory starts with the state at `0`, then the
/// series-launch state at `r_s`, then every accepted step.
pub fn integrate_radial(spec: &EllipticSystemSpec, psi0: &[f64], r_end: f64, tol: f64) -> Result<Vec<RadialState>> {
    spec.check_shape()?;
    let m = spec.m;
    if psi0.len() != m || psi0.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
        return Err(Error::InvalidArgument("psi0 must be m positive values".into()));
    }
    if !(r_end >= 0.0 && r_end.is_finite()) || !(tol > 0.0) {
        return Err(Error::InvalidArgument("need r_end >= 0 and tol > 0".into()));
    }
    let start = RadialState {
        r: 0.0,
        psi: psi0.to_vec(),
        dpsi: vec![0.0; m],
    };
    if r_end == 0.0 {
        return Ok(vec![start]);
    }
    let n = spec.n as f64;
    let phi0: Vec<f64> = spec.a.iter().map(|row| power_product(row, psi0)).collect();

    // ψ = p + q r² + s r⁴
    let q: Vec<f64> = phi0.iter().map(|f| -f / (2.0 * n)).collect();
    let s: Vec<f64> = (0..m)
        .map(|i| {
            let lin: f64 = (0..m).map(|j| spec.a[i][j] * q[j] / psi0[j]).sum();
            -phi0[i] * lin / (4.0 * (n + 2.0))
        })
        .collect();
    let rs = launch_radius(spec.n, &phi0, r_end, tol);
    let launch = RadialState {
        r: rs,
        psi: (0..m).map(|i| psi0[i] + q[i] * rs * rs + s[i] * rs.powi(4)).collect(),
        dpsi: (0..m).map(|i| 2.0 * q[i] * rs + 4.0 * s[i] * rs.powi(3)).collect(),
    };

    let a = &spec.a;
    let rhs = |r: f64, y: &[f64]| {
        let (psi, dpsi) = y.split_at(m);
        let mut out = dpsi.to_vec();
        out.extend((0..m).map(|i| -(n - 1.0) / r * dpsi[i] - signed_pow_product(&a[i], psi)));
        out
    };
    let scale = psi0.iter().copied().fold(0.0, f64::max);
    let opts = RkOptions {
        atol: tol * scale,
        ..RkOptions::with_tol(tol)
    };
    let mut y0 = launch.psi.clone();
    y0.extend_from_slice(&launch.dpsi);

    let mut traj = vec![start];
    let mut lost: Option<(f64, usize)> = None;
    integrate(rhs, rs, &y0, r_end, &opts, |r, y| {
        let (psi, dpsi) = y.split_at(m);
        if let Some(i) = psi.iter().position(|p| *p <= 0.0) {
            lost = Some((r, i));
            return Control::Stop;
        }
        traj.push(RadialState {
            r,
            psi: psi.to_vec(),
            dpsi: dpsi.to_vec(),
        });
        Control::Continue
    })?;
    if let Some((r, component)) = lost {
        return Err(Error::PositivityLoss { r, component });
    }
    Ok(traj)
}

/// `ψ_i(r) = α_i (μ² + r²)^{−(N−2)/2}`.
pub fn closed_form_psi(n: usize, alphas: &[f64], mu: f64, r: f64) -> Vec<f64> {
    let k = (n as f64 - 2.0) / 2.0;
    let s = mu * mu + r * r;
    alphas.iter().map(|a| a * s.powf(-k)).collect()
}

pub fn closed_form_dpsi(n: usize, alphas: &[f64], mu: f64, r: f64) -> Vec<f64> {
    let k = (n as f64 - 2.0) / 2.0;
    let s = mu * mu + r * r;
    alphas.iter().map(|a| -2.0 * k * a * r * s.powf(-k - 1.0)).collect()
}

/// Relative residual of the radial equation for the closed form, from
/// `ψ″ + (N−1)/r ψ′ = −N(N−2) μ² α (μ² + r²)^{−(N+2)/2}`.
pub fn closed_form_residual(spec: &EllipticSystemSpec, alphas: &[f64], mu: f64, r: f64) -> Vec<f64> {
    let n = spec.n as f64;
    let s = mu * mu + r * r;
    let psi = closed_form_psi(spec.n, alphas, mu, r);
    (0..spec.m)
        .map(|i| {
            let lap = -n * (n - 2.0) * mu * mu * alphas[i] * s.powf(-(n + 2.0) / 2.0);
            let src = power_product(&spec.a[i], &psi);
            (lap + src) / lap.abs().max(src.abs())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootResult {
    pub mu: f64,
    pub alphas: Vec<f64>,
    /// Coordinates along the kernel of `I − A`.
    pub kernel_coords: Vec<f64>,
    /// Largest relative Robin (and terminal) mismatch at `r = 2d`.
    pub residual: f64,
    pub iterations: usize,
}

const SHOOT_INTEGRATION_TOL: f64 = 1e-13;

/// Shoots from `r = 0` over `(log μ, kernel coordinates)` so that at `r = 2d`
/// `ψ_i′ + (N−2)/(4d) ψ_i + c_i Π_j ψ_j^{b_ij} = 0` and, if `terminal` is given,
/// `ψ_i(2d) = terminal_i`. `α` follows the log-linear condition at scale `μ`.
pub fn shoot_robin(spec: &EllipticSystemSpec, d: f64, tol: f64, terminal: Option<&[f64]>) -> Result<ShootResult> {
    spec.check_shape()?;
    if !(d > 0.0 && d.is_finite()) || !(tol > 0.0) {
        return Err(Error::InvalidArgument("need d > 0 and tol > 0".into()));
    }
    if terminal.is_some_and(|t| t.len() != spec.m || t.iter().any(|v| !(*v > 0.0))) {
        return Err(Error::InvalidArgument("terminal values must be m positives".into()));
    }
    let m = spec.m;
    let n = spec.n as f64;
    let r_end = 2.0 * d;
    let robin = (n - 2.0) / (4.0 * d);
    let kernel = solve_betas(spec, 1.0, DEFAULT_TOL_SOLVE)?.nullity;

    let alphas_at = |x: &DVector<f64>| -> Option<(f64, Vec<f64>)> {
        let mu = x[0].exp();
        let sol = solve_betas(spec, mu, DEFAULT_TOL_SOLVE).ok()?;
        let coords: Vec<f64> = x.iter().skip(1).copied().collect();
        Some((mu, sol.family_member(&coords)))
    };
    let residual = |x: &DVector<f64>| -> Option<DVector<f64>> {
        let (mu, alphas) = alphas_at(x)?;
        let psi0: Vec<f64> = alphas.iter().map(|a| a * mu.powf(2.0 - n)).collect();
        let traj = integrate_radial(spec, &psi0, r_end, SHOOT_INTEGRATION_TOL).ok()?;
        let end = traj.last()?;
        let mut rows: Vec<f64> = (0..m)
            .map(|i| (end.dpsi[i] + robin * end.psi[i] + spec.c[i] * power_product(&spec.b[i], &end.psi)) / (robin * end.psi[i]))
            .collect();
        if let Some(t) = terminal {
            rows.extend((0..m).map(|i| end.psi[i] / t[i] - 1.0));
        }
        Some(DVector::from_vec(rows))
    };

    let c_mean = spec.c.iter().sum::<f64>() / m as f64;
    let mu_guess = if c_mean < 0.0 {
        4.0 * d
    } else if c_mean > 0.0 {
        d
    } else {
        2.0 * d
    };
    let mut x0 = DVector::zeros(1 + kernel);
    x0[0] = mu_guess.ln();
    let opts = LmOptions {
        max_iter: 100,
        step_tol: 1e-15,
        residual_tol: 1e-3 * tol,
        initial_damping: 1e-3,
    };
    let out = minimize(|x| Some((residual(x)?, fd_jacobian(residual, x, 1e-6)?)), x0, opts);
    let worst = out.residual.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if !(worst <= tol) {
        return Err(Error::ShootFailed {
            iterations: out.iterations,
            residual: worst,
        });
    }
    let (mu, alphas) = alphas_at(&out.x).ok_or(Error::ShootFailed {
        iterations: out.iterations,
        residual: worst,
    })?;
    Ok(ShootResult {
        mu,
        alphas,
        kernel_coords: out.x.iter().skip(1).copied().collect(),
        residual: worst,
        iterations: out.iterations,
    })
}

/// Columns `r, psi1..psim, dpsi1..dpsim`.
pub fn write_trajectory_csv<W: Write>(traj: &[RadialState], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let m = traj.first().map_or(0, |s| s.psi.len());
    let mut header = vec!["r".to_string()];
    header.extend((1..=m).map(|i| format!("psi{i}")));
    header.extend((1..=m).map(|i| format!("dpsi{i}")));
    w.write_record(&header)?;
    for s in traj {
        let mut rec = vec![s.r.to_string()];
        rec.extend(s.psi.iter().chain(&s.dpsi).map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
