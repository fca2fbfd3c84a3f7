//! Inversion of the half-space onto a ball: the transformed bubble is radial
//! about the ball center and equals `α(μ² + r²)^{−(N−2)/2}`.

use halfspace_bubbles::cli::{closed_form_gap, default_centers, half_space_samples};
use halfspace_bubbles::conformal::{recover_mu_alpha, verify_radial, verify_t_properties, BallField};
use halfspace_bubbles::{fixtures, ConformalSetup};

fn main() -> halfspace_bubbles::Result<()> {
    for f in fixtures::standard() {
        let p = f.params()?;
        let setup = ConformalSetup::from_params(&p)?;
        let n = setup.dim();
        let props = verify_t_properties(&setup, &default_centers(n), &half_space_samples(n, 10_000, 5))?;
        let v = BallField {
            inner: &p,
            setup: setup.clone(),
        };
        let radial = verify_radial(&setup, &v, &[0.5 * setup.d, setup.d, 1.5 * setup.d], 200)?;
        let ma = recover_mu_alpha(&setup, &p)?;
        println!("{}: d={:.6} mu={:.6} alpha={:?} t={:.6}", f.name, setup.d, ma.mu, ma.alphas, ma.t);
        for pc in &props.properties {
            println!("    {:<34} {:.2e} ({})", pc.name, pc.max_violation, if pc.passed { "ok" } else { "FAIL" });
        }
        let radial_max = radial.iter().copied().fold(0.0, f64::max);
        let gap = closed_form_gap(&setup, &v, &ma.alphas, ma.mu, 100, 9);
        println!("    radial variation {radial_max:.1e}, closed-form gap {gap:.1e}");
    }
    Ok(())
}
