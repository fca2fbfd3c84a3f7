//! Bubble parameters (σ, β, y⁰) for each built-in system, including the
//! one-parameter family of a rank-deficient exponent matrix.

use halfspace_bubbles::bubble::{solve_betas, DEFAULT_TOL_SOLVE};
use halfspace_bubbles::fixtures;

fn main() -> halfspace_bubbles::Result<()> {
    for f in fixtures::standard().into_iter().chain([fixtures::coupled_degenerate()]) {
        let p = f.params()?;
        println!("{:<18} sigma={} betas={:?} y0_N={:.15}", f.name, p.sigma, p.betas, p.y0n());
    }

    let f = fixtures::coupled_degenerate();
    let sol = solve_betas(&f.spec, 1.0, DEFAULT_TOL_SOLVE)?;
    println!("\nnullity {} kernel {:?}", sol.nullity, sol.null_basis);
    for t in [-1.0, 0.0, 1.0] {
        let b = sol.family_member(&[t]);
        println!("  t={t:+}: beta={b:?}  beta1*beta2={:.12}", b[0] * b[1]);
    }

    // scaling law for the scalar case: beta = (3 sigma^2)^(1/4)
    let f = fixtures::scalar_neumann();
    for sigma in [0.5, 1.0, 2.0] {
        let b = solve_betas(&f.spec, sigma, DEFAULT_TOL_SOLVE)?.betas()[0];
        println!("sigma={sigma}: beta={b:.16} (3 sigma^2)^(1/4)={:.16}", (3.0 * sigma * sigma).powf(0.25));
    }
    Ok(())
}
