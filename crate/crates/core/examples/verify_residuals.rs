//! Analytic and finite-difference residuals of a bubble, plus the observed
//! order of the difference stencils.

use halfspace_bubbles::bubble::{boundary_residual_relative, interior_residual_relative};
use halfspace_bubbles::fd::{convergence_order, residual_sweep, BoxRegion};
use halfspace_bubbles::{fixtures, samples};

fn main() -> halfspace_bubbles::Result<()> {
    let f = fixtures::scalar_negative();
    let p = f.params()?;

    let pts = samples::box_points(&[-3.0, -3.0, 0.01], &[3.0, 3.0, 3.0], 1000, 1);
    let worst = pts
        .iter()
        .map(|y| interior_residual_relative(&f.spec, &p, y)[0].abs())
        .fold(0.0, f64::max);
    let worst_b = pts
        .iter()
        .map(|y| boundary_residual_relative(&f.spec, &p, &[y[0], y[1], 0.0])[0].abs())
        .fold(0.0, f64::max);
    println!("analytic relative residual: interior {worst:.2e}, boundary {worst_b:.2e}");

    let region = BoxRegion::new(vec![-2.0, -2.0, 0.0], vec![2.0, 2.0, 2.0])?;
    let rep = residual_sweep(&f.spec, &p, &region, 9, 1e-3)?;
    println!(
        "fd at h=1e-3: interior {:.3e} boundary {:.3e} ({} + {} points)",
        rep.max_interior(),
        rep.max_boundary(),
        rep.n_interior,
        rep.n_boundary
    );

    let conv = convergence_order(&f.spec, &p, &region, 9, &[4e-3, 2e-3, 1e-3])?;
    println!("slopes: interior {:?} boundary {:?}", conv.interior_slopes, conv.boundary_slopes);
    Ok(())
}
