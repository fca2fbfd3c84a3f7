//! One-dimensional profiles u(t) of the system leave the positive cone in
//! finite time; each run produces a certificate with the crossing time.
//!
//!     cargo run --example halfline_breakdown [-- trace.csv]

use halfspace_bubbles::ode::halfline_breakdown;
use halfspace_bubbles::EllipticSystemSpec;

fn main() -> halfspace_bubbles::Result<()> {
    for c in [-1.0, 0.0, 1.0] {
        let spec = EllipticSystemSpec::new(3, vec![vec![5.0]], vec![vec![3.0]], vec![c]);
        for u0 in [0.5, 1.0, 2.0] {
            let cert = halfline_breakdown(&spec, &[u0], 1e-12)?;
            println!(
                "c={c:+} u0={u0}: t*={:.10} u'(t*)={:.6} slopes decreasing: {}",
                cert.t_star,
                cert.final_slopes[0],
                cert.slopes_strictly_decreasing()
            );
        }
    }
    if let Some(path) = std::env::args().nth(1) {
        let spec = EllipticSystemSpec::new(3, vec![vec![5.0]], vec![vec![3.0]], vec![0.0]);
        halfline_breakdown(&spec, &[1.0], 1e-12)?.write_csv(std::fs::File::create(&path)?)?;
        println!("trace written to {path}");
    }
    Ok(())
}
