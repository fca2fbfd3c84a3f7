//! Dormand–Prince 5(4) with a standard PI-free step-size controller.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RkOptions {
    pub rtol: f64,
    pub atol: f64,
    /// 0 picks a step from the initial slope.
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl RkOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            h_init: 0.0,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

/// One Dormand–Prince step; returns the fifth-order solution and the
/// embedded error estimate.
pub fn dp45_step<F: Fn(f64, &[f64]) -> Vec<f64>>(f: &F, t: f64, y: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = y.len();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
    let mut tmp = vec![0.0; n];
    for s in 0..7 {
        for j in 0..n {
            tmp[j] = y[j] + h * (0..s).map(|r| A[s][r] * k[r][j]).sum::<f64>();
        }
        k.push(f(t + C[s] * h, &tmp));
    }
    let y5: Vec<f64> = (0..n).map(|j| y[j] + h * (0..7).map(|s| B5[s] * k[s][j]).sum::<f64>()).collect();
    let err: Vec<f64> = (0..n).map(|j| h * (0..7).map(|s| (B5[s] - B4[s]) * k[s][j]).sum::<f64>()).collect();
    (y5, err)
}

/// What the observer wants after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Integrates `y′ = f(t, y)` from `t0` to `t_end`, calling `observe` on every
/// accepted state (including the initial one). Returns the last state.
pub fn integrate<F, O>(f: F, t0: f64, y0: &[f64], t_end: f64, opts: &RkOptions, mut observe: O) -> Result<(f64, Vec<f64>)>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
    O: FnMut(f64, &[f64]) -> Control,
{
    let mut t = t0;
    let mut y = y0.to_vec();
    if observe(t, &y) == Control::Stop || t_end <= t0 {
        return Ok((t, y));
    }
    let span = t_end - t0;
    let mut h = if opts.h_init > 0.0 {
        opts.h_init
    } else {
        let f0 = f(t, &y);
        let scale = y.iter().map(|v| opts.atol + opts.rtol * v.abs()).collect::<Vec<_>>();
        let d0 = rms_ratio(&y, &scale);
        let d1 = rms_ratio(&f0, &scale);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0.min(span)
    };
    h = h.min(opts.h_max);

    for _ in 0..opts.max_steps {
        if t >= t_end {
            return Ok((t, y));
        }
        let last = t + h >= t_end;
        let step = if last { t_end - t } else { h };
        let (y_new, err) = dp45_step(&f, t, &y, step);
        let scale: Vec<f64> = y.iter().zip(&y_new).map(|(a, b)| opts.atol + opts.rtol * a.abs().max(b.abs())).collect();
        let e = rms_ratio(&err, &scale);
        if !e.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            h = step * 0.25;
        } else if e <= 1.0 {
            t = if last { t_end } else { t + step };
            y = y_new;
            if observe(t, &y) == Control::Stop {
                return Ok((t, y));
            }
            let fac = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
            h = (step * fac).min(opts.h_max);
            continue;
        } else {
            h = step * (0.9 * e.powf(-0.2)).clamp(0.1, 1.0);
        }
        if h <= 1e-14 * t.abs().max(span) {
            return Err(Error::StepFailure { t, h });
        }
    }
    Err(Error::StepFailure { t, h })
}

fn rms_ratio(v: &[f64], scale: &[f64]) -> f64 {
    (v.iter().zip(scale).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}
