//! Kelvin transforms `u_{x,λ}`, the differences `w_{x,λ} = u − u_{x,λ}`, and
//! a numerical moving-spheres sweep that locates the critical radius.

use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::bubble::BubbleParams;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{dist, dist2, invert, norm};

/// Inversion in the sphere `∂B(x, λ)` with `x` on the boundary hyperplane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereInversion {
    x: Vec<f64>,
    lambda: f64,
}

impl SphereInversion {
    pub fn new(x: Vec<f64>, lambda: f64) -> Result<Self> {
        if x.len() < 3 {
            return Err(Error::InvalidArgument("center needs N >= 3 coordinates".into()));
        }
        if *x.last().unwrap() != 0.0 {
            return Err(Error::InvalidArgument("inversion center must lie on y_N = 0".into()));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self { x, lambda })
    }

    pub fn center(&self) -> &[f64] {
        &self.x
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// `x + λ²(y − x)/|y − x|²`.
pub fn kelvin_point(inv: &SphereInversion, y: &[f64]) -> Result<Vec<f64>> {
    invert(&inv.x, inv.lambda, y).ok_or(Error::SingularPoint { distance: dist(y, &inv.x) })
}

/// `(λ/|y − x|)^{N−2} u(x + λ²(y − x)/|y − x|²)`.
pub fn kelvin_transform_u<F: Field>(u: &F, inv: &SphereInversion, y: &[f64]) -> Result<Vec<f64>> {
    let z = kelvin_point(inv, y)?;
    let weight = (inv.lambda / dist(y, &inv.x)).powi(y.len() as i32 - 2);
    Ok(u.eval(&z).into_iter().map(|v| weight * v).collect())
}

/// `w_{x,λ} = u − u_{x,λ}`.
pub fn difference_w<F: Field>(u: &F, inv: &SphereInversion, y: &[f64]) -> Result<Vec<f64>> {
    let t = kelvin_transform_u(u, inv, y)?;
    Ok(u.eval(y).into_iter().zip(t).map(|(a, b)| a - b).collect())
}

/// The Kelvin transform of a field, itself usable as a [`Field`].
/// Evaluates to `NaN` at the inversion center.
pub struct KelvinField<F> {
    pub inner: F,
    pub inv: SphereInversion,
}

impl<F: Field> Field for KelvinField<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn components(&self) -> usize {
        self.inner.components()
    }
    fn eval(&self, y: &[f64]) -> Vec<f64> {
        kelvin_transform_u(&self.inner, &self.inv, y).unwrap_or_else(|_| vec![f64::NAN; self.components()])
    }
}

/// `λ̄(x) = sqrt(d² + |x − x̄|²)` with `d² = σ² + (y⁰_N)²`, `x̄ = (y⁰′, 0)`.
pub fn critical_lambda_exact(params: &BubbleParams, x: &[f64]) -> f64 {
    (params.boundary_scale_sq() + dist2(x, &params.boundary_center())).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub lambda_grid: Vec<f64>,
    /// `min_w[k][i]`: minimum of `w_i` over samples with `|y − x| ≥ λ_k`.
    pub min_w: Vec<Vec<f64>>,
    pub argmin: Vec<Vec<Vec<f64>>>,
    pub lambda_critical_numeric: Option<f64>,
    pub bracket: (f64, f64),
    pub tol_w: f64,
}

impl SweepResult {
    /// Columns: `lambda, component, min_w, y1..yN` of the minimizing sample.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let n = self.argmin.first().and_then(|a| a.first()).map_or(0, |p| p.len());
        let mut header = vec!["lambda".to_string(), "component".into(), "min_w".into()];
        header.extend((1..=n).map(|k| format!("y{k}")));
        wtr.write_record(&header)?;
        for (k, lambda) in self.lambda_grid.iter().enumerate() {
            for (i, w) in self.min_w[k].iter().enumerate() {
                let mut rec = vec![lambda.to_string(), i.to_string(), w.to_string()];
                rec.extend(self.argmin[k][i].iter().map(|c| c.to_string()));
                wtr.write_record(&rec)?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Field values at the samples, computed once per sweep.
struct SweepData<'a, F> {
    u: &'a F,
    x: &'a [f64],
    samples: &'a [Vec<f64>],
    values: Vec<Vec<f64>>,
}

impl<F: Field> SweepData<'_, F> {
    fn min_w(&self, lambda: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = self.x.len();
        let m = self.u.components();
        let mut mins = vec![f64::INFINITY; m];
        let mut arg = vec![vec![f64::NAN; n]; m];
        for (y, uy) in self.samples.iter().zip(&self.values) {
            let r = dist(y, self.x);
            if r < lambda {
                continue;
            }
            let s = lambda * lambda / (r * r);
            let z: Vec<f64> = self.x.iter().zip(y).map(|(c, yk)| c + s * (yk - c)).collect();
            let weight = (lambda / r).powi(n as i32 - 2);
            let uz = self.u.eval(&z);
            for i in 0..m {
                let w = uy[i] - weight * uz[i];
                if w < mins[i] {
                    mins[i] = w;
                    arg[i] = y.clone();
                }
            }
        }
        (mins, arg)
    }

    fn admissible(&self, lambda: f64, tol_w: f64) -> bool {
        self.min_w(lambda).0.iter().all(|w| *w >= -tol_w)
    }
}

/// Per-component minimum of `w_{x,λ}` over the samples outside `B(x, λ)`.
pub fn min_w_at<F: Field>(u: &F, x: &[f64], samples: &[Vec<f64>], lambda: f64) -> Result<Vec<f64>> {
    SphereInversion::new(x.to_vec(), lambda)?;
    let values = samples.iter().map(|y| u.eval(y)).collect();
    Ok(SweepData { u, x, samples, values }.min_w(lambda).0)
}

/// Sweeps `λ` over a geometric grid on `[lambda_lo, lambda_hi]`, recording
/// the minimum of `w_{x,λ}` over the samples outside `B(x, λ)`, then bisects
/// the first sign change to relative width `1e−10`.
///
/// `tol_w` defaults to `1e−9 · max sampled u`.
pub fn sweep_moving_spheres<F: Field>(
    u: &F,
    x: &[f64],
    samples: &[Vec<f64>],
    lambda_lo: f64,
    lambda_hi: f64,
    n_lambda: usize,
    tol_w: Option<f64>,
) -> Result<SweepResult> {
    if !(lambda_lo > 0.0 && lambda_lo < lambda_hi) || n_lambda < 2 {
        return Err(Error::InvalidArgument("need 0 < lambda_lo < lambda_hi and n_lambda >= 2".into()));
    }
    SphereInversion::new(x.to_vec(), lambda_lo)?;
    let n = x.len();
    for y in samples {
        if y.len() != n || y[n - 1] < 0.0 {
            return Err(Error::InvalidArgument("samples must lie in the closed half-space".into()));
        }
    }
    let values: Vec<Vec<f64>> = samples.iter().map(|y| u.eval(y)).collect();
    let tol_w = tol_w.unwrap_or_else(|| 1e-9 * values.iter().flatten().fold(0.0, |a, b| f64::max(a, *b)));
    let data = SweepData { u, x, samples, values };

    let lambda_grid = crate::samples::geometric_radii(lambda_lo, lambda_hi, n_lambda);
    let mut min_w = Vec::with_capacity(n_lambda);
    let mut argmin = Vec::with_capacity(n_lambda);
    for &lambda in &lambda_grid {
        let (mins, arg) = data.min_w(lambda);
        min_w.push(mins);
        argmin.push(arg);
    }

    let negative = |mins: &Vec<f64>| mins.iter().any(|w| *w < -tol_w);
    if negative(&min_w[0]) {
        let worst = min_w[0].iter().copied().fold(f64::INFINITY, f64::min);
        return Err(Error::BadBracket {
            lambda: lambda_lo,
            min_w: worst,
            tol_w,
        });
    }
    let Some(k) = min_w.iter().position(negative) else {
        return Ok(SweepResult {
            lambda_grid,
            min_w,
            argmin,
            lambda_critical_numeric: None,
            bracket: (lambda_lo, lambda_hi),
            tol_w,
        });
    };

    let (mut lo, mut hi) = (lambda_grid[k - 1], lambda_grid[k]);
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if data.admissible(mid, tol_w) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(SweepResult {
        lambda_grid,
        min_w,
        argmin,
        lambda_critical_numeric: Some(0.5 * (lo + hi)),
        bracket: (lo, hi),
        tol_w,
    })
}

/// Standard sweep sample set about `x`: polar grid from `r_min` out to
/// `50 · lambda_estimate`.
pub fn standard_sweep_samples(x: &[f64], r_min: f64, lambda_estimate: f64) -> Vec<Vec<f64>> {
    crate::samples::polar_grid(x, r_min, 50.0 * lambda_estimate, 60, 160, crate::samples::DEFAULT_SEED)
}

/// Per-component `sup |w_{x,λ̄(x)}(y)| / u(y)` over the samples.
pub fn verify_symmetry_identity(params: &BubbleParams, x: &[f64], samples: &[Vec<f64>]) -> Result<Vec<f64>> {
    let inv = SphereInversion::new(x.to_vec(), critical_lambda_exact(params, x))?;
    let mut sup = vec![0.0f64; params.betas.len()];
    for y in samples {
        if dist(y, x) < 1e-6 {
            continue;
        }
        let u = params.eval(y);
        let w = difference_w(params, &inv, y)?;
        for i in 0..sup.len() {
            sup[i] = sup[i].max(w[i].abs() / u[i]);
        }
    }
    Ok(sup)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub radii: Vec<f64>,
    /// `estimates[direction][radius][component] = |y|^{N−2} u_i(y)`.
    pub estimates: Vec<Vec<Vec<f64>>>,
    /// Per component, the worst relative deviation from the expected limit at the largest radius.
    pub max_rel_error: Vec<f64>,
}

/// Samples `|y|^{N−2} u_i(y)` along rays `y = r·direction`.
pub fn decay_check<F: Field>(u: &F, betas_expected: &[f64], directions: &[Vec<f64>], radii: &[f64]) -> Result<DecayReport> {
    let n = u.dim();
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("radii must be increasing".into()));
    }
    let mut estimates = Vec::with_capacity(directions.len());
    let mut max_rel_error = vec![0.0f64; betas_expected.len()];
    for dir in directions {
        let len = norm(dir);
        if dir.len() != n || dir[n - 1] < 0.0 || len == 0.0 {
            return Err(Error::InvalidArgument("directions must point into the closed half-space".into()));
        }
        let per_radius: Vec<Vec<f64>> = radii
            .iter()
            .map(|r| {
                let y: Vec<f64> = dir.iter().map(|d| r * d / len).collect();
                u.eval(&y).into_iter().map(|v| r.powi(n as i32 - 2) * v).collect()
            })
            .collect();
        for (i, beta) in betas_expected.iter().enumerate() {
            let last = per_radius.last().unwrap()[i];
            max_rel_error[i] = max_rel_error[i].max((last - beta).abs() / beta);
        }
        estimates.push(per_radius);
    }
    Ok(DecayReport {
        radii: radii.to_vec(),
        estimates,
        max_rel_error,
    })
}
