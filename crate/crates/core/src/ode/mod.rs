//! Adaptive integration of the radial ball system and the half-line system.

pub mod halfline;
pub mod radial;
pub mod rk;

pub use halfline::{halfline_breakdown, BreakdownCertificate, TraceSample, HORIZON};
pub use radial::{
    closed_form_dpsi, closed_form_psi, closed_form_residual, integrate_radial, launch_radius, shoot_robin, write_trajectory_csv, RadialState,
    ShootResult,
};

/// `sign(u)|u|^e`, so the right-hand side stays finite a hair past zero.
pub(crate) fn signed_pow_product(exponents: &[f64], values: &[f64]) -> f64 {
    let mut acc = 1.0;
    for (e, v) in exponents.iter().zip(values) {
        if *e != 0.0 {
            acc *= v.signum() * v.abs().powf(*e);
        }
    }
    acc
}
