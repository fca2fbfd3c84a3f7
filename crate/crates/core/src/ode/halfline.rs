use serde::{Deserialize, Serialize};
use std::io::Write;

use super::rk::{dp45_step, integrate, Control, RkOptions};
use super::signed_pow_product;
use crate::error::{Error, Result};
use crate::exponent_system::EllipticSystemSpec;
use crate::geometry::power_product;

/// No crossing before this time is reported as [`Error::HorizonExceeded`].
pub const HORIZON: f64 = 1e6;
const INTEGRATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: f64,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// `u_i″ = −Π_j u_j^{a_ij}`.
    pub ddu: Vec<f64>,
}

/// A finite time at which a component of `u″ = −Π u^a` leaves the positive cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownCertificate {
    pub t_star: f64,
    pub failing_component: usize,
    /// `(t_lo, t_hi)`: all components positive at `t_lo`, `u_failing(t_hi) ≤ 0`; `t_star = t_hi`.
    pub bracket: (f64, f64),
    /// Accepted steps on `[0, t_lo]`, then the state at `t_star`.
    pub trace: Vec<TraceSample>,
    /// `u_i′(t_star)`: the observed slope plateaus.
    pub final_slopes: Vec<f64>,
}

impl BreakdownCertificate {
    /// Every `u_i′` strictly decreasing along the trace: `u_i″ < 0` at each
    /// positive sample, and `u_i′` drops between samples wherever the drop is
    /// resolvable in floating point.
    pub fn slopes_strictly_decreasing(&self) -> bool {
        let positive = &self.trace[..self.trace.len() - 1];
        if positive.iter().any(|s| s.ddu.iter().any(|v| !(*v < 0.0))) {
            return false;
        }
        self.trace.windows(2).all(|w| {
            let dt = w[1].t - w[0].t;
            (0..w[0].du.len()).all(|i| {
                let drop = w[0].du[i] - w[1].du[i];
                let expected = dt * w[0].ddu[i].abs().min(w[1].ddu[i].abs());
                let ulp = 4.0 * f64::EPSILON * w[0].du[i].abs().max(w[1].du[i].abs());
                drop >= 0.0 && (drop > 0.0 || expected <= ulp)
            })
        })
    }

    /// The certificate's own claim: positive up to `t_lo`, failing at `t_star`.
    pub fn is_consistent(&self) -> bool {
        let (last, body) = self.trace.split_last().expect("trace has the final state");
        last.t == self.t_star
            && last.u[self.failing_component] <= 0.0
            && body.iter().all(|s| s.u.iter().all(|v| *v > 0.0))
            && self.bracket.0 < self.bracket.1
    }

    /// Columns `t, u1..um, du1..dum`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let m = self.final_slopes.len();
        let mut header = vec!["t".to_string()];
        header.extend((1..=m).map(|i| format!("u{i}")));
        header.extend((1..=m).map(|i| format!("du{i}")));
        header.extend((1..=m).map(|i| format!("ddu{i}")));
        w.write_record(&header)?;
        for s in &self.trace {
            let mut rec = vec![s.t.to_string()];
            rec.extend(s.u.iter().chain(&s.du).chain(&s.ddu).map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Integrates `u_i″ = −Π_j u_j^{a_ij}` with `u(0) = u0`, `u_i′(0) = c_i Π_j u0_j^{b_ij}`
/// until a component reaches zero; the crossing is bisected inside the failing
/// step down to a time width `tol` or `|u| ≤ 1e−12 · max u0`.
pub fn halfline_breakdown(spec: &EllipticSystemSpec, u0: &[f64], tol: f64) -> Result<BreakdownCertificate> {
    spec.check_shape()?;
    let m = spec.m;
    if u0.len() != m || u0.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument("u0 must be m positive values".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let mut y0 = u0.to_vec();
    y0.extend((0..m).map(|i| spec.c[i] * power_product(&spec.b[i], u0)));
    let a = &spec.a;
    let rhs = |_: f64, y: &[f64]| {
        let (u, du) = y.split_at(m);
        let mut out = du.to_vec();
        out.extend((0..m).map(|i| -signed_pow_product(&a[i], u)));
        out
    };
    let u_scale = u0.iter().copied().fold(0.0, f64::max);
    let opts = RkOptions {
        atol: INTEGRATION_TOL * u_scale,
        ..RkOptions::with_tol(INTEGRATION_TOL)
    };

    let mut trace: Vec<TraceSample> = Vec::new();
    let mut crossed: Option<f64> = None;
    integrate(rhs, 0.0, &y0, HORIZON, &opts, |t, y| {
        let (u, du) = y.split_at(m);
        if u.iter().any(|v| *v <= 0.0) {
            crossed = Some(t);
            return Control::Stop;
        }
        let ddu = (0..m).map(|i| -signed_pow_product(&a[i], u)).collect();
        trace.push(TraceSample {
            t,
            u: u.to_vec(),
            du: du.to_vec(),
            ddu,
        });
        Control::Continue
    })?;
    let Some(t_cross) = crossed else {
        return Err(Error::HorizonExceeded { horizon: HORIZON });
    };

    // Bisect a single step from the last positive state.
    let last = trace.last().expect("initial state is positive").clone();
    let mut ylast = last.u.clone();
    ylast.extend_from_slice(&last.du);
    let min_u = |h: f64| -> (f64, usize, Vec<f64>) {
        let (y, _) = dp45_step(&rhs, last.t, &ylast, h);
        let (i, v) = y[..m]
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, v)| if *v < acc.1 { (i, *v) } else { acc });
        (v, i, y)
    };
    let mut lo = 0.0;
    let mut hi = t_cross - last.t;
    let floor = 1e-12 * u_scale;
    let (mut v_hi, mut idx, mut y_hi) = min_u(hi);
    while hi - lo > tol && v_hi.abs() > floor {
        let mid = 0.5 * (lo + hi);
        let (v, i, y) = min_u(mid);
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
            v_hi = v;
            idx = i;
            y_hi = y;
        }
    }
    let t_star = last.t + hi;
    let final_slopes = y_hi[m..].to_vec();
    let ddu = (0..m).map(|i| -signed_pow_product(&a[i], &y_hi[..m])).collect();
    trace.push(TraceSample {
        t: t_star,
        u: y_hi[..m].to_vec(),
        du: final_slopes.clone(),
        ddu,
    });
    Ok(BreakdownCertificate {
        t_star,
        failing_component: idx,
        bracket: (last.t + lo, t_star),
        trace,
        final_slopes,
    })
}
