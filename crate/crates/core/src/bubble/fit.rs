//! Least-squares fit of boundary data to `A_i (d² + |x − x̄|²)^{−(N−2)/2}`
//! with `(d, x̄)` shared across components.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::dist2;
use crate::lm::{self, LmOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    /// Full `N`-vector with last coordinate zero.
    pub point: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileGuess {
    pub amplitudes: Vec<f64>,
    pub d: f64,
    pub xbar: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileFit {
    pub amplitudes: Vec<f64>,
    pub d: f64,
    pub xbar: Vec<f64>,
    /// Root-mean-square of `model/value − 1` over all samples and components.
    pub rms: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub max_iter: usize,
    pub step_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            step_tol: 1e-12,
        }
    }
}

impl ProfileGuess {
    /// Heuristic start: peak sample for `x̄`, farthest sample for `d`.
    pub fn from_samples(samples: &[BoundarySample]) -> Result<Self> {
        let first = samples.first().ok_or_else(|| Error::InvalidArgument("no samples".into()))?;
        let n = first.point.len();
        let k = (n as f64 - 2.0) / 2.0;
        let peak = samples.iter().max_by(|a, b| a.values[0].total_cmp(&b.values[0])).expect("non-empty");
        let far = samples
            .iter()
            .max_by(|a, b| dist2(&a.point, &peak.point).total_cmp(&dist2(&b.point, &peak.point)))
            .expect("non-empty");
        let r2 = dist2(&far.point, &peak.point);
        let ratio = (peak.values[0] / far.values[0]).powf(1.0 / k) - 1.0;
        let d = if ratio > 1e-8 && r2 > 0.0 { (r2 / ratio).sqrt() } else { 1.0 };
        let amplitudes = peak.values.iter().map(|v| v * d.powf(2.0 * k)).collect();
        Ok(Self {
            amplitudes,
            d,
            xbar: peak.point.clone(),
        })
    }
}

/// Damped Gauss–Newton fit of the boundary restriction form.
///
/// Parameters are `(log A_1..m, log d, x̄_1..x̄_{N−1})`; residuals are the
/// relative misfits `model/value − 1`.
pub fn fit_boundary_profile(samples: &[BoundarySample], guess: Option<ProfileGuess>, opts: FitOptions) -> Result<ProfileFit> {
    let first = samples.first().ok_or_else(|| Error::InvalidArgument("no samples".into()))?;
    let n = first.point.len();
    let m = first.values.len();
    if n < 3 || m == 0 {
        return Err(Error::InvalidArgument("samples need N >= 3 coordinates and m >= 1 values".into()));
    }
    for s in samples {
        if s.point.len() != n || s.values.len() != m {
            return Err(Error::InvalidArgument("inconsistent sample shapes".into()));
        }
        if s.point[n - 1] != 0.0 {
            return Err(Error::InvalidArgument("sample points must lie on y_N = 0".into()));
        }
        if s.values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument("sample values must be positive".into()));
        }
    }
    let mut distinct: Vec<&Vec<f64>> = samples.iter().map(|s| &s.point).collect();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    if distinct.len() < n + 1 {
        return Err(Error::InvalidArgument(format!(
            "need at least {} distinct sample points, got {}",
            n + 1,
            distinct.len()
        )));
    }

    let guess = match guess {
        Some(g) => g,
        None => ProfileGuess::from_samples(samples)?,
    };
    let k = (n as f64 - 2.0) / 2.0;
    let n_params = m + 1 + (n - 1);
    let mut x0 = DVector::zeros(n_params);
    for i in 0..m {
        x0[i] = guess.amplitudes[i].ln();
    }
    x0[m] = guess.d.ln();
    for l in 0..n - 1 {
        x0[m + 1 + l] = guess.xbar[l];
    }

    let n_res = samples.len() * m;
    let eval = |p: &DVector<f64>| -> Option<(DVector<f64>, DMatrix<f64>)> {
        let d2 = (2.0 * p[m]).exp();
        let mut r = DVector::zeros(n_res);
        let mut jac = DMatrix::zeros(n_res, n_params);
        for (si, s) in samples.iter().enumerate() {
            let offsets: Vec<f64> = (0..n - 1).map(|l| s.point[l] - p[m + 1 + l]).collect();
            let sq = d2 + offsets.iter().map(|o| o * o).sum::<f64>();
            let log_sq = sq.ln();
            for i in 0..m {
                let row = si * m + i;
                let q = (p[i] - k * log_sq - s.values[i].ln()).exp();
                if !q.is_finite() {
                    return None;
                }
                r[row] = q - 1.0;
                jac[(row, i)] = q;
                jac[(row, m)] = -k * q * 2.0 * d2 / sq;
                for l in 0..n - 1 {
                    jac[(row, m + 1 + l)] = 2.0 * k * q * offsets[l] / sq;
                }
            }
        }
        Some((r, jac))
    };

    let out = lm::minimize(
        eval,
        x0,
        LmOptions {
            max_iter: opts.max_iter,
            step_tol: opts.step_tol,
            residual_tol: 0.0,
            initial_damping: 1e-3,
        },
    );
    let rms = out.rms();
    if !out.converged {
        return Err(Error::FitDiverged {
            iterations: out.iterations,
            rms,
        });
    }
    let mut xbar = vec![0.0; n];
    xbar[..n - 1].copy_from_slice(&out.x.as_slice()[m + 1..]);
    Ok(ProfileFit {
        amplitudes: (0..m).map(|i| out.x[i].exp()).collect(),
        d: out.x[m].exp(),
        xbar,
        rms,
        iterations: out.iterations,
    })
}
