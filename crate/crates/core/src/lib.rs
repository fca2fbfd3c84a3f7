//! Explicit "bubble" solutions of the critical semilinear elliptic system
//!
//! ```text
//!   Δu_i + Π_j u_j^{a_ij} = 0          in the upper half-space y_N > 0
//!   ∂u_i/∂y_N = c_i Π_j u_j^{b_ij}      on y_N = 0
//! ```
//!
//! together with the numerical machinery that checks everything known about
//! them: exponent-matrix structure, parameter identities, residuals (analytic
//! and finite-difference), Kelvin-inversion symmetry at the critical radius,
//! the conformal reduction to a ball, the radial ODE system and the
//! positivity breakdown of one-dimensional profiles.
//!
//! The modules are layered bottom-up:
//!
//! * [`exponent_system`]: the structural data `(N, m, A, B, c)` and its validation.
//! * [`bubble`]: parameter solve `(σ, β, y⁰)`, evaluation, analytic residuals,
//!   boundary-profile fitting.
//! * [`kelvin`]: sphere inversions, `w = u − u_{x,λ}`, moving-spheres sweeps.
//! * [`conformal`]: the inversion `T` onto `B(Q, 2d)` and the transformed fields.
//! * [`ode`]: adaptive Runge–Kutta, the radial system, shooting, half-line breakdown.
//! * [`fd`]: finite-difference residual engine and convergence studies.
//! * [`cli`]: the `bubbles` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bubble;
pub mod cli;
pub mod conformal;
pub mod error;
pub mod exponent_system;
pub mod fd;
pub mod field;
pub mod fixtures;
pub mod geometry;
pub mod kelvin;
pub mod lm;
pub mod ode;
pub mod report;
pub mod samples;

pub use bubble::{BubbleParams, LogLinearSolveResult, Y0Report};
pub use conformal::ConformalSetup;
pub use error::{Error, Result};
pub use exponent_system::{EllipticSystemSpec, ValidationReport};
pub use fd::ResidualReport;
pub use field::Field;
pub use kelvin::{SphereInversion, SweepResult};
pub use ode::{BreakdownCertificate, RadialState};
