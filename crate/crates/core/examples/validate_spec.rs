//! Structural checks on an exponent system: row sums, sign constraints, irreducibility.
//!
//!     cargo run --example validate_spec [-- path/to/spec.json]

use halfspace_bubbles::exponent_system::{is_irreducible, validate_spec, DEFAULT_TOL_ROW};
use halfspace_bubbles::EllipticSystemSpec;

fn main() -> halfspace_bubbles::Result<()> {
    let spec = match std::env::args().nth(1) {
        Some(path) => EllipticSystemSpec::from_json_file(path)?,
        None => EllipticSystemSpec::new(
            4,
            vec![vec![3.0, 0.0], vec![0.0, 3.0]],
            vec![vec![2.0, 0.0], vec![0.0, 2.0]],
            vec![0.0, 0.0],
        ),
    };
    let report = validate_spec(&spec, DEFAULT_TOL_ROW)?;
    println!("N={} m={} irreducible={}", spec.n, spec.m, is_irreducible(&spec.a));
    println!(
        "interior row sum should be {}, boundary {}",
        spec.interior_row_sum(),
        spec.boundary_row_sum()
    );
    for v in &report.violations {
        println!(
            "  {:?} row={:?} col={:?}: measured {:e} expected {:e}",
            v.rule, v.row, v.col, v.measured, v.expected
        );
    }
    println!("passed: {}", report.passed);
    Ok(())
}
