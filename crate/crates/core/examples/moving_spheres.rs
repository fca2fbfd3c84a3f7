//! Moving-spheres sweep: the largest radius at which `u ≥ u_{x,λ}` outside the
//! sphere, compared with the closed-form critical radius, and the symmetry
//! `u = u_{x,λ̄}` at that radius.

use halfspace_bubbles::fixtures;
use halfspace_bubbles::kelvin::{critical_lambda_exact, standard_sweep_samples, sweep_moving_spheres, verify_symmetry_identity};

fn main() -> halfspace_bubbles::Result<()> {
    let f = fixtures::scalar_negative();
    let p = f.params()?;
    for x in [vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![3.0, 4.0, 0.0]] {
        let exact = critical_lambda_exact(&p, &x);
        let samples = standard_sweep_samples(&x, 1e-3 * exact, exact);
        let sweep = sweep_moving_spheres(&p, &x, &samples, 0.1 * exact, 10.0 * exact, 40, None)?;
        let numeric = sweep.lambda_critical_numeric.expect("sign change inside the range");
        let sym = verify_symmetry_identity(&p, &x, &samples)?;
        println!(
            "x={x:?}: numeric {numeric:.10} exact {exact:.10} rel {:.1e}; sup|w|/u at exact radius {:.1e}",
            (numeric - exact).abs() / exact,
            sym[0]
        );
    }
    Ok(())
}
