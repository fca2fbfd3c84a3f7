//! Recover a bubble's boundary trace `A(d² + |y′ − x̄|²)^{−(N−2)/2}` from
//! exact samples on `y_N = 0` by nonlinear least squares.

use halfspace_bubbles::bubble::{fit_boundary_profile, BoundarySample, FitOptions};
use halfspace_bubbles::{fixtures, samples, Field};

fn main() -> halfspace_bubbles::Result<()> {
    let f = fixtures::scalar_negative();
    let mut p = f.params()?;
    p.y0[0] = 0.7;
    p.y0[1] = -1.2;
    let pts = samples::box_points(&[-4.0, -4.0, 0.0], &[4.0, 4.0, 0.0], 200, 3);
    let data: Vec<BoundarySample> = pts
        .into_iter()
        .map(|y| BoundarySample {
            values: p.eval(&y),
            point: y,
        })
        .collect();
    let fit = fit_boundary_profile(&data, None, FitOptions::default())?;
    println!("fitted d^2 = {:.12} (true {:.12})", fit.d * fit.d, p.boundary_scale_sq());
    println!("fitted xbar = {:?} (true {:?})", fit.xbar, p.boundary_center());
    println!("rms {:.1e} after {} iterations", fit.rms, fit.iterations);
    Ok(())
}
