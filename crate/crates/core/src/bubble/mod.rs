//! The classified solution family
//!
//! ```text
//!   u_i(y) = β_i (σ² + |y − y⁰|²)^{−(N−2)/2}
//! ```
//!
//! with `log β_i = Σ_j a_ij log β_j − log(σ² N(N−2))` and the center height
//! `y⁰_N = σ² N c_i Π_j β_j^{b_ij − a_ij}` (the same for every row).
//!
//! All products `Π u_j^{e_j}` are evaluated as `exp(Σ e_j log u_j)`.

mod fit;

pub use fit::{fit_boundary_profile, BoundarySample, FitOptions, ProfileFit, ProfileGuess};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::exponent_system::EllipticSystemSpec;
use crate::field::Field;
use crate::geometry::{dist2, log_product};

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_THRESHOLD: f64 = 1e-10;
pub const DEFAULT_TOL_SOLVE: f64 = 1e-10;
pub const DEFAULT_TOL_PARAM: f64 = 1e-10;

/// `(σ, β, y⁰)` for one member of the family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleParams {
    pub sigma: f64,
    pub betas: Vec<f64>,
    pub y0: Vec<f64>,
}

/// Solution of `(I − A) x = −log(σ²N(N−2)) 𝟙` for `x = log β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLinearSolveResult {
    pub log_betas_particular: Vec<f64>,
    pub nullity: usize,
    /// Orthonormal basis of `ker(I − A)`, each vector with a positive leading entry.
    pub null_basis: Vec<Vec<f64>>,
    pub consistent: bool,
    pub left_null_residual: f64,
}

impl LogLinearSolveResult {
    pub fn betas(&self) -> Vec<f64> {
        self.log_betas_particular.iter().map(|x| x.exp()).collect()
    }

    /// `exp(x_p + Σ_k t_k n_k)`: a member of the affine family.
    pub fn family_member(&self, coords: &[f64]) -> Vec<f64> {
        self.family_log_member(coords).into_iter().map(f64::exp).collect()
    }

    pub fn family_log_member(&self, coords: &[f64]) -> Vec<f64> {
        let mut x = self.log_betas_particular.clone();
        for (t, basis) in coords.iter().zip(&self.null_basis) {
            for (xi, ni) in x.iter_mut().zip(basis) {
                *xi += t * ni;
            }
        }
        x
    }
}

/// Solves the log-linear parameter system by SVD. In the rank-deficient
/// case the minimum-norm particular solution and a kernel basis are returned.
pub fn solve_betas(spec: &EllipticSystemSpec, sigma: f64, tol_solve: f64) -> Result<LogLinearSolveResult> {
    spec.check_shape()?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    let m = spec.m;
    let n = spec.n as f64;
    let level = (sigma * sigma * n * (n - 2.0)).ln();
    let mat = DMatrix::from_fn(m, m, |i, j| if i == j { 1.0 } else { 0.0 } - spec.a[i][j]);
    let rhs = DVector::from_element(m, -level);

    let svd = mat.svd(true, true);
    let u = svd.u.as_ref().expect("U requested");
    let v_t = svd.v_t.as_ref().expect("V^T requested");
    let s_max = svd.singular_values.max();
    let threshold = RANK_THRESHOLD * s_max;

    let mut x = DVector::zeros(m);
    let mut left_null = DVector::zeros(m);
    let mut null_basis = Vec::new();
    for k in 0..m {
        let sk = svd.singular_values[k];
        let uk = u.column(k);
        let coeff = uk.dot(&rhs);
        if sk > threshold {
            x += v_t.row(k).transpose() * (coeff / sk);
        } else {
            left_null += uk * coeff;
            let mut v: Vec<f64> = v_t.row(k).iter().copied().collect();
            if let Some(lead) = v.iter().find(|c| c.abs() > 1e-12) {
                if *lead < 0.0 {
                    v.iter_mut().for_each(|c| *c = -*c);
                }
            }
            null_basis.push(v);
        }
    }
    let left_null_residual = left_null.norm();
    if left_null_residual > tol_solve {
        return Err(Error::NoBubbleParameters {
            residual: left_null_residual,
            tol: tol_solve,
        });
    }
    Ok(LogLinearSolveResult {
        log_betas_particular: x.iter().copied().collect(),
        nullity: null_basis.len(),
        null_basis,
        consistent: true,
        left_null_residual,
    })
}

/// Per-row center heights `σ² N c_i Π_j β_j^{b_ij − a_ij}`, their mean and spread.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Y0Report {
    pub y0n: f64,
    pub per_row: Vec<f64>,
    pub spread: f64,
}

impl Y0Report {
    pub fn consistent(&self, tol_param: f64) -> bool {
        self.spread <= tol_param * (1.0 + self.y0n.abs())
    }
}

/// Per-row center heights without the consistency verdict.
pub fn y0n_rows(spec: &EllipticSystemSpec, betas: &[f64], sigma: f64) -> Y0Report {
    let n = spec.n as f64;
    let logs: Vec<f64> = betas.iter().map(|b| b.ln()).collect();
    let per_row: Vec<f64> = (0..spec.m)
        .map(|i| {
            if spec.c[i] == 0.0 {
                return 0.0;
            }
            let diff: Vec<f64> = (0..spec.m).map(|j| spec.b[i][j] - spec.a[i][j]).collect();
            sigma * sigma * n * spec.c[i] * log_product(&diff, &logs)
        })
        .collect();
    let y0n = per_row.iter().sum::<f64>() / per_row.len() as f64;
    let spread = per_row.iter().map(|v| (v - y0n).abs()).fold(0.0, f64::max);
    Y0Report { y0n, per_row, spread }
}

/// Like [`y0n_rows`] but fails when the rows disagree beyond
/// `tol_param·(1 + |y0N|)`.
pub fn compute_y0n(spec: &EllipticSystemSpec, betas: &[f64], sigma: f64, tol_param: f64) -> Result<Y0Report> {
    if betas.len() != spec.m || betas.iter().any(|b| !(*b > 0.0)) {
        return Err(Error::InvalidArgument("betas must be m positive numbers".into()));
    }
    let report = y0n_rows(spec, betas, sigma);
    if !report.consistent(tol_param) {
        return Err(Error::IncompatibleBoundaryCoefficients {
            mean: report.y0n,
            spread: report.spread,
            per_row: report.per_row,
        });
    }
    Ok(report)
}

impl BubbleParams {
    /// Solves for `β` at the given `σ`, takes the particular (minimum-norm)
    /// family member, and places the center at `(tangential, y0N)`.
    pub fn from_spec(spec: &EllipticSystemSpec, sigma: f64, tangential: Option<&[f64]>) -> Result<Self> {
        let solve = solve_betas(spec, sigma, DEFAULT_TOL_SOLVE)?;
        Self::from_betas(spec, sigma, solve.betas(), tangential)
    }

    pub fn from_betas(spec: &EllipticSystemSpec, sigma: f64, betas: Vec<f64>, tangential: Option<&[f64]>) -> Result<Self> {
        let y0 = compute_y0n(spec, &betas, sigma, DEFAULT_TOL_PARAM)?;
        let mut center = vec![0.0; spec.n];
        if let Some(t) = tangential {
            if t.len() != spec.n - 1 {
                return Err(Error::InvalidArgument(format!("tangential center needs {} coordinates", spec.n - 1)));
            }
            center[..spec.n - 1].copy_from_slice(t);
        }
        center[spec.n - 1] = y0.y0n;
        Ok(Self { sigma, betas, y0: center })
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn y0n(&self) -> f64 {
        *self.y0.last().expect("non-empty center")
    }

    /// `d² = σ² + (y⁰_N)²`: squared scale of the boundary restriction.
    pub fn boundary_scale_sq(&self) -> f64 {
        self.sigma * self.sigma + self.y0n() * self.y0n()
    }

    /// `x̄ = (y⁰′, 0)`.
    pub fn boundary_center(&self) -> Vec<f64> {
        let mut x = self.y0.clone();
        *x.last_mut().unwrap() = 0.0;
        x
    }

    fn half_weight(&self) -> f64 {
        (self.y0.len() as f64 - 2.0) / 2.0
    }

    fn check_against(&self, spec: &EllipticSystemSpec) -> Result<()> {
        if self.y0.len() != spec.n || self.betas.len() != spec.m {
            return Err(Error::InvalidArgument("params do not match spec dimensions".into()));
        }
        Ok(())
    }

    /// Residuals of the two parameter identities, in log form and as center
    /// height differences.
    pub fn identity_residuals(&self, spec: &EllipticSystemSpec) -> Result<ParamResiduals> {
        self.check_against(spec)?;
        let n = spec.n as f64;
        let logs: Vec<f64> = self.betas.iter().map(|b| b.ln()).collect();
        let level = (self.sigma * self.sigma * n * (n - 2.0)).ln();
        let log_identity = (0..spec.m)
            .map(|i| {
                let sum: f64 = (0..spec.m).map(|j| spec.a[i][j] * logs[j]).sum();
                logs[i] - sum + level
            })
            .collect();
        let rows = y0n_rows(spec, &self.betas, self.sigma);
        let center = rows.per_row.iter().map(|v| self.y0n() - v).collect();
        Ok(ParamResiduals { log_identity, center })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamResiduals {
    pub log_identity: Vec<f64>,
    pub center: Vec<f64>,
}

impl ParamResiduals {
    pub fn max_abs(&self) -> f64 {
        self.log_identity.iter().chain(&self.center).map(|v| v.abs()).fold(0.0, f64::max)
    }
}

impl Field for BubbleParams {
    fn dim(&self) -> usize {
        self.y0.len()
    }
    fn components(&self) -> usize {
        self.betas.len()
    }
    fn eval(&self, y: &[f64]) -> Vec<f64> {
        evaluate_bubble(self, y)
    }
    fn eval_component(&self, y: &[f64], i: usize) -> f64 {
        let s = self.sigma * self.sigma + dist2(y, &self.y0);
        (self.betas[i].ln() - self.half_weight() * s.ln()).exp()
    }
}

/// `u_i(y) = β_i (σ² + |y − y⁰|²)^{−(N−2)/2}`.
pub fn evaluate_bubble(params: &BubbleParams, y: &[f64]) -> Vec<f64> {
    let s = params.sigma * params.sigma + dist2(y, &params.y0);
    let ls = params.half_weight() * s.ln();
    params.betas.iter().map(|b| (b.ln() - ls).exp()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BubbleDerivatives {
    /// `m × N`.
    pub gradients: Vec<Vec<f64>>,
    pub laplacians: Vec<f64>,
}

/// `∇u_i = −(N−2) β_i (y − y⁰) s^{−N/2}` and
/// `Δu_i = −N(N−2) σ² β_i s^{−(N+2)/2}` with `s = σ² + |y − y⁰|²`.
pub fn evaluate_bubble_derivatives(params: &BubbleParams, y: &[f64]) -> BubbleDerivatives {
    let n = params.y0.len() as f64;
    let s = params.sigma * params.sigma + dist2(y, &params.y0);
    let ls = s.ln();
    let gradients = params
        .betas
        .iter()
        .map(|b| {
            let scale = -(n - 2.0) * (b.ln() - 0.5 * n * ls).exp();
            y.iter().zip(&params.y0).map(|(yk, ck)| scale * (yk - ck)).collect()
        })
        .collect();
    let laplacians = params
        .betas
        .iter()
        .map(|b| -n * (n - 2.0) * params.sigma * params.sigma * (b.ln() - 0.5 * (n + 2.0) * ls).exp())
        .collect();
    BubbleDerivatives { gradients, laplacians }
}

/// `Δu_i + Π_j u_j^{a_ij}` with the analytic Laplacian.
pub fn interior_residual_analytic(spec: &EllipticSystemSpec, params: &BubbleParams, y: &[f64]) -> Vec<f64> {
    interior_terms(spec, params, y).into_iter().map(|(lap, src)| lap + src).collect()
}

/// Interior residual divided by `max(|Δu_i|, |Π u^a|)`.
pub fn interior_residual_relative(spec: &EllipticSystemSpec, params: &BubbleParams, y: &[f64]) -> Vec<f64> {
    interior_terms(spec, params, y)
        .into_iter()
        .map(|(lap, src)| relative(lap + src, lap.abs().max(src.abs())))
        .collect()
}

fn interior_terms(spec: &EllipticSystemSpec, params: &BubbleParams, y: &[f64]) -> Vec<(f64, f64)> {
    let der = evaluate_bubble_derivatives(params, y);
    let logs: Vec<f64> = evaluate_bubble(params, y).iter().map(|v| v.ln()).collect();
    (0..spec.m).map(|i| (der.laplacians[i], log_product(&spec.a[i], &logs))).collect()
}

/// `∂u_i/∂y_N − c_i Π_j u_j^{b_ij}` at a boundary point, analytic gradient.
pub fn boundary_residual_analytic(spec: &EllipticSystemSpec, params: &BubbleParams, yprime: &[f64]) -> Vec<f64> {
    boundary_terms(spec, params, yprime).into_iter().map(|(d, src)| d - src).collect()
}

pub fn boundary_residual_relative(spec: &EllipticSystemSpec, params: &BubbleParams, yprime: &[f64]) -> Vec<f64> {
    boundary_terms(spec, params, yprime)
        .into_iter()
        .map(|(d, src)| relative(d - src, d.abs().max(src.abs())))
        .collect()
}

fn boundary_terms(spec: &EllipticSystemSpec, params: &BubbleParams, yprime: &[f64]) -> Vec<(f64, f64)> {
    let n = spec.n;
    let der = evaluate_bubble_derivatives(params, yprime);
    let logs: Vec<f64> = evaluate_bubble(params, yprime).iter().map(|v| v.ln()).collect();
    (0..spec.m)
        .map(|i| (der.gradients[i][n - 1], spec.c[i] * log_product(&spec.b[i], &logs)))
        .collect()
}

fn relative(residual: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        residual.abs()
    } else {
        residual.abs() / scale
    }
}
