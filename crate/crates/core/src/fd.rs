//! Finite-difference residuals for given fields: second-order central
//! Laplacian inside, second-order one-sided normal derivative on `y_N = 0`.

use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::{Error, Result};
use crate::exponent_system::EllipticSystemSpec;
use crate::field::Field;
use crate::geometry::{dist, log_product};
use crate::samples::cell_lattice;

/// Where stencil points are allowed to land.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Whole,
    /// Closed half-space `y_N ≥ 0`.
    HalfSpace,
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
}

impl Domain {
    pub fn contains(&self, y: &[f64]) -> bool {
        match self {
            Domain::Whole => true,
            Domain::HalfSpace => *y.last().unwrap() >= 0.0,
            Domain::Ball { center, radius } => dist(y, center) <= *radius * (1.0 + 1e-14),
        }
    }
}

/// `Σ_k (f(y + h e_k) − 2 f(y) + f(y − h e_k)) / h²`.
pub fn fd_laplacian<F: Fn(&[f64]) -> f64>(f: F, y: &[f64], h: f64, domain: &Domain) -> Result<f64> {
    let f0 = f(y);
    let mut acc = 0.0;
    let mut p = y.to_vec();
    for k in 0..y.len() {
        p[k] = y[k] + h;
        if !domain.contains(&p) {
            return Err(Error::StencilOutOfDomain { point: y.to_vec(), h });
        }
        let fp = f(&p);
        p[k] = y[k] - h;
        if !domain.contains(&p) {
            return Err(Error::StencilOutOfDomain { point: y.to_vec(), h });
        }
        let fm = f(&p);
        p[k] = y[k];
        acc += fp - 2.0 * f0 + fm;
    }
    Ok(acc / (h * h))
}

/// `(−3 f(y′) + 4 f(y′ + h e_N) − f(y′ + 2h e_N)) / (2h)`.
pub fn fd_normal_derivative<F: Fn(&[f64]) -> f64>(f: F, yprime: &[f64], h: f64) -> f64 {
    let n = yprime.len();
    let mut p1 = yprime.to_vec();
    let mut p2 = yprime.to_vec();
    p1[n - 1] += h;
    p2[n - 1] += 2.0 * h;
    (-3.0 * f(yprime) + 4.0 * f(&p1) - f(&p2)) / (2.0 * h)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResidual {
    pub boundary: bool,
    pub point: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// Per-component sup-norm residuals over a sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub sup_interior: Vec<f64>,
    pub sup_boundary: Vec<f64>,
    pub argmax_interior: Vec<Option<Vec<f64>>>,
    pub argmax_boundary: Vec<Option<Vec<f64>>>,
    pub h: f64,
    pub n_interior: usize,
    pub n_boundary: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<PointResidual>>,
}

impl ResidualReport {
    pub fn new(m: usize, h: f64) -> Self {
        Self {
            sup_interior: vec![0.0; m],
            sup_boundary: vec![0.0; m],
            argmax_interior: vec![None; m],
            argmax_boundary: vec![None; m],
            h,
            n_interior: 0,
            n_boundary: 0,
            points: None,
        }
    }

    /// Keep every per-point residual (for CSV dumps).
    pub fn keep_points(mut self) -> Self {
        self.points = Some(Vec::new());
        self
    }

    /// Records the absolute residuals of one interior point.
    pub fn record_interior(&mut self, residuals: &[f64], point: &[f64]) {
        self.n_interior += 1;
        for (i, r) in residuals.iter().enumerate() {
            let r = r.abs();
            if r > self.sup_interior[i] || r.is_nan() {
                self.sup_interior[i] = r;
                self.argmax_interior[i] = Some(point.to_vec());
            }
        }
        if let Some(pts) = &mut self.points {
            pts.push(PointResidual {
                boundary: false,
                point: point.to_vec(),
                residuals: residuals.iter().map(|r| r.abs()).collect(),
            });
        }
    }

    pub fn record_boundary(&mut self, residuals: &[f64], point: &[f64]) {
        self.n_boundary += 1;
        for (i, r) in residuals.iter().enumerate() {
            let r = r.abs();
            if r > self.sup_boundary[i] || r.is_nan() {
                self.sup_boundary[i] = r;
                self.argmax_boundary[i] = Some(point.to_vec());
            }
        }
        if let Some(pts) = &mut self.points {
            pts.push(PointResidual {
                boundary: true,
                point: point.to_vec(),
                residuals: residuals.iter().map(|r| r.abs()).collect(),
            });
        }
    }

    pub fn max_interior(&self) -> f64 {
        self.sup_interior.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_boundary(&self) -> f64 {
        self.sup_boundary.iter().copied().fold(0.0, f64::max)
    }

    /// Columns: `kind, y1..yN, r1..rm`. Requires [`ResidualReport::keep_points`].
    pub fn write_points_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let pts = self.points.as_deref().unwrap_or(&[]);
        if let Some(first) = pts.first() {
            let mut header = vec!["kind".to_string()];
            header.extend((1..=first.point.len()).map(|k| format!("y{k}")));
            header.extend((1..=first.residuals.len()).map(|k| format!("r{k}")));
            wtr.write_record(&header)?;
        }
        for p in pts {
            let mut rec = vec![if p.boundary { "boundary" } else { "interior" }.to_string()];
            rec.extend(p.point.iter().map(|c| c.to_string()));
            rec.extend(p.residuals.iter().map(|c| c.to_string()));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Axis-aligned box `[lo, hi]` inside the closed half-space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() < 3 {
            return Err(Error::InvalidArgument("box bounds need N >= 3 matching coordinates".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) || *lo.last().unwrap() < 0.0 {
            return Err(Error::InvalidArgument("box must satisfy lo < hi and lie in y_N >= 0".into()));
        }
        Ok(Self { lo, hi })
    }

    /// Default step: `1e−3 ·` box diameter.
    pub fn default_h(&self) -> f64 {
        1e-3 * dist(&self.lo, &self.hi)
    }

    pub fn interior_lattice(&self, per_axis: usize) -> Vec<Vec<f64>> {
        cell_lattice(&self.lo, &self.hi, per_axis)
    }

    /// Lattice on `y_N = 0`; empty unless the box touches the boundary.
    pub fn boundary_lattice(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let n = self.lo.len();
        if self.lo[n - 1] != 0.0 {
            return Vec::new();
        }
        cell_lattice(&self.lo[..n - 1], &self.hi[..n - 1], per_axis)
            .into_iter()
            .map(|mut p| {
                p.push(0.0);
                p
            })
            .collect()
    }
}

/// Interior residual `Δu_i + Π u_j^{a_ij}` on a cell-centred lattice and
/// boundary residual `∂u_i/∂y_N − c_i Π u_j^{b_ij}` on the boundary lattice.
pub fn residual_sweep<F: Field>(spec: &EllipticSystemSpec, u: &F, region: &BoxRegion, n_per_axis: usize, h: f64) -> Result<ResidualReport> {
    sweep_into(spec, u, region, n_per_axis, h, ResidualReport::new(spec.m, h))
}

/// As [`residual_sweep`], keeping every per-point residual.
pub fn residual_sweep_with_points<F: Field>(
    spec: &EllipticSystemSpec,
    u: &F,
    region: &BoxRegion,
    n_per_axis: usize,
    h: f64,
) -> Result<ResidualReport> {
    sweep_into(spec, u, region, n_per_axis, h, ResidualReport::new(spec.m, h).keep_points())
}

fn sweep_into<F: Field>(
    spec: &EllipticSystemSpec,
    u: &F,
    region: &BoxRegion,
    n_per_axis: usize,
    h: f64,
    mut report: ResidualReport,
) -> Result<ResidualReport> {
    spec.check_shape()?;
    if u.dim() != spec.n || region.lo.len() != spec.n || u.components() != spec.m {
        return Err(Error::InvalidArgument("field, box and spec dimensions disagree".into()));
    }
    if !(h > 0.0) || n_per_axis == 0 {
        return Err(Error::InvalidArgument("need h > 0 and n_per_axis >= 1".into()));
    }
    let m = spec.m;
    for y in region.interior_lattice(n_per_axis) {
        let logs: Vec<f64> = u.eval(&y).iter().map(|v| v.ln()).collect();
        let mut res = vec![0.0; m];
        for (i, r) in res.iter_mut().enumerate() {
            let lap = fd_laplacian(|p| u.eval_component(p, i), &y, h, &Domain::HalfSpace)?;
            *r = lap + log_product(&spec.a[i], &logs);
        }
        report.record_interior(&res, &y);
    }
    for y in region.boundary_lattice(n_per_axis) {
        let logs: Vec<f64> = u.eval(&y).iter().map(|v| v.ln()).collect();
        let res: Vec<f64> = (0..m)
            .map(|i| fd_normal_derivative(|p| u.eval_component(p, i), &y, h) - spec.c[i] * log_product(&spec.b[i], &logs))
            .collect();
        report.record_boundary(&res, &y);
    }
    Ok(report)
}

/// Outcome of fitting `log(residual) ≈ p log(h) + c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SlopeFit {
    Fitted {
        slope: f64,
    },
    /// Residuals at or below the rounding floor; no order can be read off.
    Degenerate {
        floor: f64,
    },
}

impl SlopeFit {
    pub fn slope(&self) -> Option<f64> {
        match self {
            SlopeFit::Fitted { slope } => Some(*slope),
            SlopeFit::Degenerate { .. } => None,
        }
    }
}

/// Least-squares slope of `log(values)` against `log(hs)`.
pub fn fit_log_slope(hs: &[f64], values: &[f64], floor: f64) -> SlopeFit {
    if values.iter().any(|v| !(v.is_finite() && *v > floor)) {
        return SlopeFit::Degenerate { floor };
    }
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    SlopeFit::Fitted { slope: sxy / sxx }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub h_list: Vec<f64>,
    /// `sup_interior[level][component]`.
    pub sup_interior: Vec<Vec<f64>>,
    pub sup_boundary: Vec<Vec<f64>>,
    pub interior_slopes: Vec<SlopeFit>,
    pub boundary_slopes: Vec<SlopeFit>,
}

/// Runs [`residual_sweep`] for each `h` and fits the observed order per component.
pub fn convergence_order<F: Field>(
    spec: &EllipticSystemSpec,
    u: &F,
    region: &BoxRegion,
    n_per_axis: usize,
    h_list: &[f64],
) -> Result<ConvergenceReport> {
    if h_list.len() < 3 || h_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(
            "h_list must be strictly decreasing with at least 3 entries".into(),
        ));
    }
    let reports = h_list
        .iter()
        .map(|&h| residual_sweep(spec, u, region, n_per_axis, h))
        .collect::<Result<Vec<_>>>()?;
    let h_min = *h_list.last().unwrap();
    let scale: Vec<f64> = {
        let mut s = vec![0.0f64; spec.m];
        for y in region.interior_lattice(n_per_axis).iter().chain(&region.boundary_lattice(n_per_axis)) {
            for (si, v) in s.iter_mut().zip(u.eval(y)) {
                *si = si.max(v.abs());
            }
        }
        s
    };
    let eps = f64::EPSILON;
    let mut interior_slopes = Vec::with_capacity(spec.m);
    let mut boundary_slopes = Vec::with_capacity(spec.m);
    for i in 0..spec.m {
        let vals: Vec<f64> = reports.iter().map(|r| r.sup_interior[i]).collect();
        interior_slopes.push(fit_log_slope(h_list, &vals, 100.0 * eps * scale[i] / (h_min * h_min)));
        if reports[0].n_boundary > 0 {
            let vals: Vec<f64> = reports.iter().map(|r| r.sup_boundary[i]).collect();
            boundary_slopes.push(fit_log_slope(h_list, &vals, 100.0 * eps * scale[i] / h_min));
        }
    }
    Ok(ConvergenceReport {
        h_list: h_list.to_vec(),
        sup_interior: reports.iter().map(|r| r.sup_interior.clone()).collect(),
        sup_boundary: reports.iter().map(|r| r.sup_boundary.clone()).collect(),
        interior_slopes,
        boundary_slopes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bubble::{evaluate_bubble_derivatives, BubbleParams};
    use crate::field::FnField;
    use crate::fixtures;

    #[test]
    fn laplacian_exact_on_quadratics() {
        for n in 3..=5 {
            let y: Vec<f64> = (0..n).map(|k| 0.3 * k as f64 + 0.2).collect();
            let r2 = |p: &[f64]| p.iter().map(|v| v * v).sum::<f64>();
            let lap = fd_laplacian(r2, &y, 0.1, &Domain::HalfSpace).unwrap();
            assert!((lap - 2.0 * n as f64).abs() < 1e-12);
            let affine = |p: &[f64]| 3.0 * p[0] - p[1] + 0.5;
            assert!(fd_laplacian(affine, &y, 0.1, &Domain::HalfSpace).unwrap().abs() < 1e-12);
            // general quadratic with cross terms: Laplacian = 2(1 + 3 + ...)
            let quad = |p: &[f64]| p[0] * p[0] + 3.0 * p[1] * p[1] + p[0] * p[2] - 2.0 * p[1];
            assert!((fd_laplacian(quad, &y, 0.05, &Domain::Whole).unwrap() - 8.0).abs() < 1e-10);
        }
    }

    #[test]
    fn laplacian_stencil_must_stay_in_domain() {
        let f = |p: &[f64]| p[0];
        assert!(matches!(
            fd_laplacian(f, &[0.0, 0.0, 0.5e-3], 1e-3, &Domain::HalfSpace),
            Err(Error::StencilOutOfDomain { .. })
        ));
    }

    #[test]
    fn normal_derivative_exact_on_quadratics() {
        let y = [0.4, -0.2, 0.0];
        assert!((fd_normal_derivative(|p| p[2], &y, 0.1) - 1.0).abs() < 1e-12);
        assert!(fd_normal_derivative(|p| p[2] * p[2], &y, 0.1).abs() < 1e-12);
        assert!((fd_normal_derivative(|p| 2.0 * p[2] * p[2] - 3.0 * p[2] + p[0], &y, 0.3) + 3.0).abs() < 1e-12);
    }

    #[test]
    fn laplacian_converges_at_order_two_on_bubble() {
        let p = BubbleParams {
            sigma: 1.0,
            betas: vec![1.3],
            y0: vec![0.2, 0.0, -0.5],
        };
        let y = [0.7, -0.4, 0.6];
        let exact = evaluate_bubble_derivatives(&p, &y).laplacians[0];
        let errs: Vec<f64> = [4e-3, 2e-3, 1e-3]
            .iter()
            .map(|&h| (fd_laplacian(|z| p.eval_component(z, 0), &y, h, &Domain::HalfSpace).unwrap() - exact).abs())
            .collect();
        let slope = fit_log_slope(&[4e-3, 2e-3, 1e-3], &errs, 0.0).slope().unwrap();
        assert!((slope - 2.0).abs() < 0.1, "{slope}");

        let exact_dn = evaluate_bubble_derivatives(&p, &[0.7, -0.4, 0.0]).gradients[0][2];
        let errs: Vec<f64> = [4e-3, 2e-3, 1e-3]
            .iter()
            .map(|&h| (fd_normal_derivative(|z| p.eval_component(z, 0), &[0.7, -0.4, 0.0], h) - exact_dn).abs())
            .collect();
        let slope = fit_log_slope(&[4e-3, 2e-3, 1e-3], &errs, 0.0).slope().unwrap();
        assert!((slope - 2.0).abs() < 0.1, "{slope}");
    }

    #[test]
    fn first_order_stencil_reads_as_slope_one() {
        let p = BubbleParams {
            sigma: 1.0,
            betas: vec![1.0],
            y0: vec![0.0, 0.0, 0.0],
        };
        let y = [0.3, 0.1, 0.0];
        let exact = evaluate_bubble_derivatives(&p, &y).gradients[0][2];
        let hs = [4e-3, 2e-3, 1e-3];
        // forward difference, first order
        let y1 = [0.3, 0.1, 0.0];
        let exact1 = evaluate_bubble_derivatives(&p, &[0.3, 0.1, 0.5]).gradients[0][2];
        let errs: Vec<f64> = hs
            .iter()
            .map(|&h| {
                let mut a = y1.to_vec();
                a[2] = 0.5;
                let mut b = a.clone();
                b[2] += h;
                ((p.eval_component(&b, 0) - p.eval_component(&a, 0)) / h - exact1).abs()
            })
            .collect();
        let slope = fit_log_slope(&hs, &errs, 0.0).slope().unwrap();
        assert!((slope - 1.0).abs() < 0.1, "{slope}");
        assert_eq!(exact, 0.0);
    }

    #[test]
    fn sweep_on_fixtures_and_perturbations() {
        let f = fixtures::scalar_negative();
        let p = f.params().unwrap();
        let region = BoxRegion::new(vec![-2.0, -2.0, 0.0], vec![2.0, 2.0, 2.0]).unwrap();
        let rep = residual_sweep(&f.spec, &p, &region, 9, 1e-3).unwrap();
        assert_eq!(rep.n_interior, 729);
        assert_eq!(rep.n_boundary, 81);
        assert!(rep.max_interior() < 1e-4 && rep.max_boundary() < 1e-4);

        let mut bad = p.clone();
        bad.betas[0] *= 1.2;
        let rep = residual_sweep(&f.spec, &bad, &region, 9, 1e-3).unwrap();
        assert!(rep.max_interior() > 1e-2);

        let f = fixtures::scalar_neumann();
        let p = f.params().unwrap();
        let rep = residual_sweep(&f.spec, &p, &region, 9, 1e-3).unwrap();
        assert!(rep.max_boundary() < 1e-8);
    }

    #[test]
    fn sweep_is_independent_of_lattice_order() {
        let f = fixtures::coupled_symmetric();
        let p = f.params().unwrap();
        let region = BoxRegion::new(vec![-1.0, -1.0, -1.0, 0.0], vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let rep = residual_sweep_with_points(&f.spec, &p, &region, 4, 1e-3).unwrap();
        let mut fresh = ResidualReport::new(2, 1e-3);
        for pt in rep.points.as_ref().unwrap().iter().rev() {
            if pt.boundary {
                fresh.record_boundary(&pt.residuals, &pt.point);
            } else {
                fresh.record_interior(&pt.residuals, &pt.point);
            }
        }
        assert_eq!(fresh.sup_interior, rep.sup_interior);
        assert_eq!(fresh.sup_boundary, rep.sup_boundary);
    }

    #[test]
    fn convergence_on_fixture_and_degenerate_field() {
        let f = fixtures::scalar_negative();
        let p = f.params().unwrap();
        let region = BoxRegion::new(vec![-2.0, -2.0, 0.0], vec![2.0, 2.0, 2.0]).unwrap();
        let rep = convergence_order(&f.spec, &p, &region, 7, &[4e-3, 2e-3, 1e-3]).unwrap();
        for s in rep.interior_slopes.iter().chain(&rep.boundary_slopes) {
            let s = s.slope().unwrap();
            assert!((s - 2.0).abs() < 0.1, "{s}");
        }

        // u = 1 + y_N: FD is exact, Laplacian 0; with A = [[5]] the source 1+... is not zero,
        // so use a system whose residual vanishes identically instead: a quadratic field
        // checked against its own exact Laplacian by a zero-exponent "source".
        let spec = EllipticSystemSpec::new(3, vec![vec![0.0]], vec![vec![0.0]], vec![1.0]);
        let lin = FnField::new(3, 1, |y: &[f64]| vec![1.0 + y[2] + 0.5 * (y[0] * y[0] - y[1] * y[1])]);
        let rep = convergence_order(&spec, &lin, &region, 5, &[4e-3, 2e-3, 1e-3]).unwrap();
        // Δu = 0 and source = 1: interior residual is exactly 1, not a convergence signal,
        // but the boundary residual ∂u/∂y_N − 1 = 0 sits at the rounding floor.
        assert!(matches!(rep.boundary_slopes[0], SlopeFit::Degenerate { .. }));
    }

    #[test]
    fn box_validation() {
        assert!(BoxRegion::new(vec![0.0, 0.0, -1.0], vec![1.0, 1.0, 1.0]).is_err());
        assert!(BoxRegion::new(vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 1.0]).is_err());
        assert!(convergence_order(
            &fixtures::scalar_neumann().spec,
            &fixtures::scalar_neumann().params().unwrap(),
            &BoxRegion::new(vec![0.0; 3], vec![1.0; 3]).unwrap(),
            3,
            &[1e-3, 2e-3, 4e-3]
        )
        .is_err());
    }
}
