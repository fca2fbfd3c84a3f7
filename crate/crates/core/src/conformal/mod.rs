//! The inversion `T y = P + 4d²(y − P)/|y − P|²` about `∂B(P, 2d)`, which maps
//! the half-space onto the ball `B(Q, 2d)`, and the transformed fields
//! `v_i(z) = (2d/|z − P|)^{N−2} u_i(Tz)`.

use serde::{Deserialize, Serialize};

use crate::bubble::BubbleParams;
use crate::error::{Error, Result};
use crate::exponent_system::EllipticSystemSpec;
use crate::fd::{self, Domain, ResidualReport};
use crate::field::Field;
use crate::geometry::{add_scaled, dist, dist2, dot, invert, log_product, sub};
use crate::samples;

/// `(x̄, d)` together with `P = x̄ − d e_N` and `Q = x̄ + d e_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalSetup {
    pub xbar: Vec<f64>,
    pub d: f64,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl ConformalSetup {
    pub fn new(xbar: Vec<f64>, d: f64) -> Result<Self> {
        let n = xbar.len();
        if n < 3 || xbar[n - 1] != 0.0 {
            return Err(Error::InvalidArgument("xbar must be a boundary point with N >= 3".into()));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidArgument(format!("d must be positive, got {d}")));
        }
        let mut p = xbar.clone();
        let mut q = xbar.clone();
        p[n - 1] = -d;
        q[n - 1] = d;
        Ok(Self { xbar, d, p, q })
    }

    /// `x̄ = (y⁰′, 0)`, `d² = σ² + (y⁰_N)²`.
    pub fn from_params(params: &BubbleParams) -> Result<Self> {
        Self::new(params.boundary_center(), params.boundary_scale_sq().sqrt())
    }

    pub fn dim(&self) -> usize {
        self.xbar.len()
    }

    /// `λ̄(x) = sqrt(d² + |x − x̄|²)`; the sphere `∂B(x, λ̄(x))` passes through `P` and `Q`.
    pub fn critical_lambda(&self, x: &[f64]) -> f64 {
        (self.d * self.d + dist2(x, &self.xbar)).sqrt()
    }

    /// Unit normal of `ℋ(x)`, the hyperplane through `Q` orthogonal to `x − P`.
    pub fn hyperplane_normal(&self, x: &[f64]) -> Vec<f64> {
        let v = sub(x, &self.p);
        let len = crate::geometry::norm(&v);
        v.into_iter().map(|c| c / len).collect()
    }

    /// Mirror image of `z` across `ℋ(x)`.
    pub fn reflect(&self, x: &[f64], z: &[f64]) -> Vec<f64> {
        let nrm = self.hyperplane_normal(x);
        let s = dot(&sub(z, &self.q), &nrm);
        add_scaled(z, -2.0 * s, &nrm)
    }
}

pub fn t_map(setup: &ConformalSetup, y: &[f64]) -> Result<Vec<f64>> {
    invert(&setup.p, 2.0 * setup.d, y).ok_or(Error::SingularPoint { distance: dist(y, &setup.p) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    pub max_violation: f64,
    pub tolerance: f64,
    pub checked: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TPropertyReport {
    pub properties: Vec<PropertyCheck>,
    pub passed: bool,
}

fn check(name: &str, max_violation: f64, tolerance: f64, checked: usize, extra_ok: bool) -> PropertyCheck {
    PropertyCheck {
        name: name.into(),
        max_violation,
        tolerance,
        checked,
        passed: extra_ok && max_violation <= tolerance,
    }
}

/// Numerically checks the four mapping properties of `T`:
/// involution, half-space onto ball, critical spheres onto hyperplanes
/// `ℋ(x)`, and mirror pairs across `ℋ(x)` onto Kelvin pairs for `∂B(x, λ̄(x))`.
pub fn verify_t_properties(setup: &ConformalSetup, boundary_xs: &[Vec<f64>], samples: &[Vec<f64>]) -> Result<TPropertyReport> {
    let n = setup.dim();
    let d = setup.d;
    for y in samples {
        if y.len() != n || y[n - 1] <= 0.0 {
            return Err(Error::InvalidArgument("samples must lie in the open half-space".into()));
        }
    }

    // (i)
    let mut inv_err: f64 = 0.0;
    for y in samples {
        let back = t_map(setup, &t_map(setup, y)?)?;
        inv_err = inv_err.max(dist(&back, y) / (dist(y, &setup.p) + d));
    }

    // (ii)
    let mut inside_excess = f64::NEG_INFINITY;
    for y in samples {
        let r = dist(&t_map(setup, y)?, &setup.q);
        inside_excess = inside_excess.max((r - 2.0 * d) / (2.0 * d));
    }
    let mut boundary_pts: Vec<Vec<f64>> = boundary_xs.to_vec();
    boundary_pts.extend(samples.iter().map(|y| {
        let mut b = y.clone();
        b[n - 1] = 0.0;
        b
    }));
    let mut sphere_err: f64 = 0.0;
    let mut hits_p = false;
    for b in &boundary_pts {
        let tb = t_map(setup, b)?;
        sphere_err = sphere_err.max((dist(&tb, &setup.q) - 2.0 * d).abs() / (2.0 * d));
        hits_p |= dist(&tb, &setup.p) == 0.0;
    }

    // (iii)
    let mut plane_err: f64 = 0.0;
    let mut plane_count = 0;
    for (k, x) in boundary_xs.iter().enumerate() {
        let lam = setup.critical_lambda(x);
        let nrm = setup.hyperplane_normal(x);
        for y in samples::sphere_points(x, lam, 400, samples::DEFAULT_SEED + k as u64) {
            if dist(&y, &setup.p) < 0.1 * d {
                continue;
            }
            let ty = t_map(setup, &y)?;
            plane_err = plane_err.max(dot(&sub(&ty, &setup.q), &nrm).abs() / d);
            plane_count += 1;
        }
    }

    // (iv)
    let mut mirror_err: f64 = 0.0;
    let mut mirror_count = 0;
    for x in boundary_xs {
        let lam = setup.critical_lambda(x);
        for y in samples {
            let z = t_map(setup, y)?;
            let z_tilde = setup.reflect(x, &z);
            let lhs = t_map(setup, &z_tilde)?;
            let tz = t_map(setup, &z)?;
            let Some(rhs) = invert(x, lam, &tz) else { continue };
            mirror_err = mirror_err.max(dist(&lhs, &rhs) / dist(&rhs, x).max(lam));
            mirror_count += 1;
        }
    }

    let properties = vec![
        check("involution", inv_err, 1e-13, samples.len(), true),
        check("half_space_into_ball", inside_excess.max(0.0), 0.0, samples.len(), inside_excess < 0.0),
        check("boundary_onto_sphere", sphere_err, 1e-12, boundary_pts.len(), !hits_p),
        check(
            "critical_sphere_onto_hyperplane",
            plane_err,
            1e-12,
            plane_count,
            plane_count > 0 || boundary_xs.is_empty(),
        ),
        check("mirror_pairs_to_kelvin_pairs", mirror_err, 1e-12, mirror_count, true),
    ];
    let passed = properties.iter().all(|p| p.passed);
    Ok(TPropertyReport { properties, passed })
}

/// `v_i(z) = (2d/|z − P|)^{N−2} u_i(Tz)`, extended by `2^{2−N} u_i(x̄)` within `1e−9·d` of `P`.
pub fn transform_v<F: Field>(setup: &ConformalSetup, u: &F, z: &[f64]) -> Vec<f64> {
    let n = setup.dim() as i32;
    let r = dist(z, &setup.p);
    if r < 1e-9 * setup.d {
        let scale = 2f64.powi(2 - n);
        return u.eval(&setup.xbar).into_iter().map(|v| scale * v).collect();
    }
    let tz = t_map(setup, z).expect("z away from P");
    let weight = (2.0 * setup.d / r).powi(n - 2);
    u.eval(&tz).into_iter().map(|v| weight * v).collect()
}

/// The transformed field `v` as a [`Field`] on the closed ball.
pub struct BallField<F> {
    pub inner: F,
    pub setup: ConformalSetup,
}

impl<F: Field> Field for BallField<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn components(&self) -> usize {
        self.inner.components()
    }
    fn eval(&self, z: &[f64]) -> Vec<f64> {
        transform_v(&self.setup, &self.inner, z)
    }
}

/// Per radius, `max_i max_z |v_i(z) − mean_i| / mean_i` over points on `∂B(Q, r)`.
pub fn verify_radial<F: Field>(setup: &ConformalSetup, v: &F, radii: &[f64], angular_samples: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(radii.len());
    for (k, &r) in radii.iter().enumerate() {
        if !(r >= 0.0 && r < 2.0 * setup.d) {
            return Err(Error::InvalidArgument(format!("radius {r} outside [0, 2d)")));
        }
        let pts = samples::sphere_points(&setup.q, r, angular_samples, samples::DEFAULT_SEED ^ k as u64);
        let vals: Vec<Vec<f64>> = pts.iter().map(|z| v.eval(z)).collect();
        let mut worst: f64 = 0.0;
        for i in 0..v.components() {
            let mean = vals.iter().map(|x| x[i]).sum::<f64>() / vals.len() as f64;
            for x in &vals {
                worst = worst.max((x[i] - mean).abs() / mean);
            }
        }
        out.push(worst);
    }
    Ok(out)
}

/// Interior samples in `B(Q, 2d − margin)` and boundary samples on `∂B(Q, 2d)`.
pub fn ball_samples(setup: &ConformalSetup, n_interior: usize, n_boundary: usize, margin: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = setup.dim();
    let inner_radius = 2.0 * setup.d - margin;
    let dirs = samples::sphere_directions(n, n_interior, seed);
    let interior = dirs
        .iter()
        .enumerate()
        .map(|(k, dir)| {
            let frac = ((k as f64 + 0.5) / n_interior as f64).powf(1.0 / n as f64);
            add_scaled(&setup.q, frac * inner_radius, dir)
        })
        .collect();
    let boundary = samples::sphere_points(&setup.q, 2.0 * setup.d, n_boundary, seed.wrapping_add(1));
    (interior, boundary)
}

/// Finite-difference residuals of the ball system: `Δv_i + Π v_j^{a_ij}` inside
/// and `∂v_i/∂ν + (N−2)/(4d) v_i + c_i Π v_j^{b_ij}` on `∂B(Q, 2d)`.
pub fn ball_system_residual<F: Field>(
    spec: &EllipticSystemSpec,
    setup: &ConformalSetup,
    v: &F,
    interior_samples: &[Vec<f64>],
    boundary_samples: &[Vec<f64>],
    h: f64,
) -> Result<ResidualReport> {
    let n = setup.dim();
    let m = spec.m;
    let radius = 2.0 * setup.d;
    let domain = Domain::Ball {
        center: setup.q.clone(),
        radius,
    };
    let mut report = ResidualReport::new(m, h);

    for z in interior_samples {
        if dist(z, &setup.q) > radius - 3.0 * h {
            return Err(Error::StencilOutOfDomain { point: z.clone(), h });
        }
        let logs: Vec<f64> = v.eval(z).iter().map(|x| x.ln()).collect();
        let mut res = vec![0.0; m];
        for (i, r) in res.iter_mut().enumerate() {
            let lap = fd::fd_laplacian(|p| v.eval_component(p, i), z, h, &domain)?;
            *r = lap + log_product(&spec.a[i], &logs);
        }
        report.record_interior(&res, z);
    }

    let robin = (n as f64 - 2.0) / (4.0 * setup.d);
    for z in boundary_samples {
        let nu: Vec<f64> = sub(z, &setup.q).into_iter().map(|c| c / radius).collect();
        let z1 = add_scaled(z, -h, &nu);
        let z2 = add_scaled(z, -2.0 * h, &nu);
        let (v0, v1, v2) = (v.eval(z), v.eval(&z1), v.eval(&z2));
        let logs: Vec<f64> = v0.iter().map(|x| x.ln()).collect();
        let res: Vec<f64> = (0..m)
            .map(|i| {
                let dnu = (3.0 * v0[i] - 4.0 * v1[i] + v2[i]) / (2.0 * h);
                dnu + robin * v0[i] + spec.c[i] * log_product(&spec.b[i], &logs)
            })
            .collect();
        report.record_boundary(&res, z);
    }
    Ok(report)
}

/// `(μ, α)` of the radial profile `ψ_i(r) = α_i (μ² + r²)^{−(N−2)/2}` about `Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuAlpha {
    pub mu: f64,
    pub alphas: Vec<f64>,
    /// `t = 4d²/(μ² + 4d²)`.
    pub t: f64,
}

/// Inverts `σ² = μ² t²`, `β_i = t^{(N−2)/2} α_i`, `y⁰ = x̄ − d(μ² − 4d²)/(μ² + 4d²) e_N`.
///
/// `t` solves `t² − t + σ²/(4d²) = 0`; of the two roots, the one whose center
/// height `d(2t − 1)` matches `y⁰_N` is taken.
pub fn recover_mu_alpha(setup: &ConformalSetup, params: &BubbleParams) -> Result<MuAlpha> {
    let d2 = setup.d * setup.d;
    let sigma2 = params.sigma * params.sigma;
    if (d2 - params.boundary_scale_sq()).abs() > 1e-10 * d2 || dist(&setup.xbar, &params.boundary_center()) > 1e-12 * (1.0 + setup.d) {
        return Err(Error::InvalidArgument("setup was not derived from these params".into()));
    }
    let disc = 1.0 - sigma2 / d2;
    if disc < -1e-12 {
        return Err(Error::NoRealRoot { sigma2, d2 });
    }
    let root = disc.max(0.0).sqrt();
    let y0n = params.y0n();
    let t = [0.5 * (1.0 + root), 0.5 * (1.0 - root)]
        .into_iter()
        .min_by(|a, b| {
            (setup.d * (2.0 * a - 1.0) - y0n)
                .abs()
                .total_cmp(&(setup.d * (2.0 * b - 1.0) - y0n).abs())
        })
        .unwrap();
    let k = (setup.dim() as f64 - 2.0) / 2.0;
    let mu = 2.0 * setup.d * ((1.0 - t) / t).sqrt();
    let alphas = params.betas.iter().map(|b| b * t.powf(-k)).collect();
    Ok(MuAlpha { mu, alphas, t })
}

/// `log α_i − Σ_j a_ij log α_j + log(μ² N(N−2))` per row.
pub fn alpha_condition_residuals(spec: &EllipticSystemSpec, alphas: &[f64], mu: f64) -> Vec<f64> {
    let n = spec.n as f64;
    let logs: Vec<f64> = alphas.iter().map(|a| a.ln()).collect();
    let level = (mu * mu * n * (n - 2.0)).ln();
    (0..spec.m)
        .map(|i| logs[i] - (0..spec.m).map(|j| spec.a[i][j] * logs[j]).sum::<f64>() + level)
        .collect()
}

#[cfg(test)]
mod tests;
