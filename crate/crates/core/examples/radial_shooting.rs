//! Radial ODE on the ball: integrate from the center, compare with the closed
//! form, then recover (μ, α) by shooting on the Robin condition at r = 2d.

use halfspace_bubbles::conformal::recover_mu_alpha;
use halfspace_bubbles::ode::{closed_form_psi, integrate_radial, shoot_robin};
use halfspace_bubbles::{fixtures, ConformalSetup};

fn main() -> halfspace_bubbles::Result<()> {
    for f in fixtures::standard().into_iter().chain([fixtures::coupled_degenerate()]) {
        let p = f.params()?;
        let setup = ConformalSetup::from_params(&p)?;
        let ma = recover_mu_alpha(&setup, &p)?;
        let psi0 = closed_form_psi(f.spec.n, &ma.alphas, ma.mu, 0.0);
        for tol in [1e-6, 1e-8, 1e-10] {
            let traj = integrate_radial(&f.spec, &psi0, 2.0 * setup.d, tol)?;
            let err = traj
                .iter()
                .map(|s| (s.psi[0] - closed_form_psi(f.spec.n, &ma.alphas, ma.mu, s.r)[0]).abs() / s.psi[0])
                .fold(0.0, f64::max);
            println!("{:<18} tol {tol:.0e}: {:>3} steps, max rel error {err:.2e}", f.name, traj.len() - 1);
        }
        let shot = shoot_robin(&f.spec, setup.d, 1e-10, None)?;
        println!(
            "{:<18} shooting mu {:.12} (closed form {:.12}) after {} iterations",
            "", shot.mu, ma.mu, shot.iterations
        );
    }
    Ok(())
}
