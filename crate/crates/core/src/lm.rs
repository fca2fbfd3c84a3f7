//! Damped Gauss–Newton (Levenberg–Marquardt) least squares on small dense problems.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Stop when `‖δ‖ ≤ step_tol · (‖x‖ + step_tol)`.
    pub step_tol: f64,
    /// Stop when `‖r‖ ≤ residual_tol`.
    pub residual_tol: f64,
    pub initial_damping: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            step_tol: 1e-12,
            residual_tol: 0.0,
            initial_damping: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub x: DVector<f64>,
    pub residual: DVector<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl LmOutcome {
    pub fn rms(&self) -> f64 {
        if self.residual.is_empty() {
            0.0
        } else {
            (self.residual.norm_squared() / self.residual.len() as f64).sqrt()
        }
    }
}

/// Minimizes `½‖r(x)‖²`. `eval` returns the residual and its Jacobian, or
/// `None` where the model is undefined (the step is then rejected).
pub fn minimize<F>(mut eval: F, x0: DVector<f64>, opts: LmOptions) -> LmOutcome
where
    F: FnMut(&DVector<f64>) -> Option<(DVector<f64>, DMatrix<f64>)>,
{
    let mut x = x0;
    let (mut r, mut j) = match eval(&x) {
        Some(v) => v,
        None => {
            let n = x.len();
            return LmOutcome {
                x,
                residual: DVector::from_element(1, f64::NAN),
                iterations: 0,
                converged: n == 0,
            };
        }
    };
    let mut cost = r.norm_squared();
    let mut lambda = opts.initial_damping;

    for iter in 1..=opts.max_iter {
        if r.norm() <= opts.residual_tol {
            return LmOutcome {
                x,
                residual: r,
                iterations: iter - 1,
                converged: true,
            };
        }
        let jt = j.transpose();
        let jtj = &jt * &j;
        let g = &jt * &r;
        let diag_scale = jtj.diagonal().map(|v| v.max(1e-300));

        let mut accepted = false;
        let mut small_step = false;
        for _ in 0..40 {
            let mut lhs = jtj.clone();
            for k in 0..lhs.nrows() {
                lhs[(k, k)] += lambda * diag_scale[k];
            }
            let Some(delta) = lhs
                .clone()
                .cholesky()
                .map(|c| c.solve(&(-&g)))
                .or_else(|| lhs.svd(true, true).solve(&(-&g), 1e-14).ok())
            else {
                lambda *= 10.0;
                continue;
            };
            small_step = delta.norm() <= opts.step_tol * (x.norm() + opts.step_tol);
            let trial = &x + &delta;
            if let Some((rt, jt_new)) = eval(&trial) {
                let ct = rt.norm_squared();
                if ct.is_finite() && ct <= cost {
                    x = trial;
                    r = rt;
                    j = jt_new;
                    cost = ct;
                    lambda = (lambda / 3.0).max(1e-15);
                    accepted = true;
                    break;
                }
            }
            if small_step {
                break;
            }
            lambda *= 4.0;
        }
        if small_step || !accepted {
            let converged = small_step || r.norm() <= opts.residual_tol;
            return LmOutcome {
                x,
                residual: r,
                iterations: iter,
                converged,
            };
        }
    }
    let converged = r.norm() <= opts.residual_tol;
    LmOutcome {
        x,
        residual: r,
        iterations: opts.max_iter,
        converged,
    }
}

/// Central-difference Jacobian of `f` at `x` with relative step `rel_step`.
pub fn fd_jacobian<F>(mut f: F, x: &DVector<f64>, rel_step: f64) -> Option<DMatrix<f64>>
where
    F: FnMut(&DVector<f64>) -> Option<DVector<f64>>,
{
    let mut cols = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        let h = rel_step * x[k].abs().max(1.0);
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[k] += h;
        xm[k] -= h;
        let fp = f(&xp)?;
        let fm = f(&xm)?;
        cols.push((fp - fm) / (2.0 * h));
    }
    Some(DMatrix::from_columns(&cols))
}
