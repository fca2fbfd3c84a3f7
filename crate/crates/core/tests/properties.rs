use proptest::prelude::*;

use halfspace_bubbles::bubble::{interior_residual_relative, solve_betas, BubbleParams, DEFAULT_TOL_SOLVE};
use halfspace_bubbles::conformal::t_map;
use halfspace_bubbles::exponent_system::{is_irreducible, validate_spec, DEFAULT_TOL_ROW};
use halfspace_bubbles::geometry::dist;
use halfspace_bubbles::kelvin::{critical_lambda_exact, difference_w, kelvin_point, SphereInversion};
use halfspace_bubbles::{ConformalSetup, EllipticSystemSpec, Field};

fn scalar(n: usize, c: f64) -> EllipticSystemSpec {
    let nf = n as f64;
    EllipticSystemSpec::new(n, vec![vec![(nf + 2.0) / (nf - 2.0)]], vec![vec![nf / (nf - 2.0)]], vec![c])
}

proptest! {
    #[test]
    fn scalar_bubbles_solve_the_system(n in 3usize..7, c in -2.0f64..2.0, sigma in 0.2f64..3.0,
                                       y in prop::collection::vec(-5.0f64..5.0, 6), yn in 0.0f64..5.0) {
        let spec = scalar(n, c);
        prop_assert!(validate_spec(&spec, DEFAULT_TOL_ROW).unwrap().passed);
        let p = BubbleParams::from_spec(&spec, sigma, None).unwrap();
        let mut pt = y[..n].to_vec();
        pt[n - 1] = yn;
        prop_assert!(interior_residual_relative(&spec, &p, &pt)[0].abs() <= 1e-12);
        // y0_N = sigma c sqrt(N/(N-2))
        let nf = n as f64;
        prop_assert!((p.y0n() - sigma * c * (nf / (nf - 2.0)).sqrt()).abs() <= 1e-12 * (1.0 + p.y0n().abs()));
    }

    #[test]
    fn bubble_equals_its_kelvin_transform_at_the_critical_radius(c in -2.0f64..2.0, x0 in -5.0f64..5.0, x1 in -5.0f64..5.0,
                                                                 y in prop::collection::vec(-8.0f64..8.0, 2), yn in 0.0f64..8.0) {
        let p = BubbleParams::from_spec(&scalar(3, c), 1.0, None).unwrap();
        let x = vec![x0, x1, 0.0];
        let inv = SphereInversion::new(x.clone(), critical_lambda_exact(&p, &x)).unwrap();
        let pt = vec![y[0], y[1], yn];
        prop_assume!(dist(&pt, &x) > 1e-3);
        let w = difference_w(&p, &inv, &pt).unwrap();
        prop_assert!(w[0].abs() <= 1e-10 * p.eval(&pt)[0]);
    }

    #[test]
    fn inversions_are_involutions(d in 0.1f64..5.0, xb in -3.0f64..3.0, y in prop::collection::vec(-10.0f64..10.0, 3), lambda in 0.1f64..5.0) {
        let s = ConformalSetup::new(vec![xb, 0.0, 0.0], d).unwrap();
        let yy = vec![y[0], y[1], y[2].abs() + 1e-3];
        let back = t_map(&s, &t_map(&s, &yy).unwrap()).unwrap();
        prop_assert!(dist(&back, &yy) <= 1e-13 * (dist(&yy, &s.p) + d));
        let inv = SphereInversion::new(vec![xb, 1.0, 0.0], lambda).unwrap();
        let k = kelvin_point(&inv, &kelvin_point(&inv, &yy).unwrap()).unwrap();
        prop_assert!(dist(&k, &yy) <= 1e-12 * (1.0 + dist(&yy, inv.center())));
    }

    #[test]
    fn positive_matrices_are_irreducible_and_solvable(a in prop::collection::vec(0.05f64..1.0, 4), n in 3usize..6) {
        // rows rescaled to the interior sum
        let nf = n as f64;
        let p = (nf + 2.0) / (nf - 2.0);
        let rows = vec![vec![a[0], a[1]], vec![a[2], a[3]]];
        let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| { let s: f64 = r.iter().sum(); r.into_iter().map(|v| v * p / s).collect() }).collect();
        prop_assert!(is_irreducible(&rows));
        let q = nf / (nf - 2.0);
        let spec = EllipticSystemSpec::new(n, rows, vec![vec![q, 0.0], vec![0.0, q]], vec![0.0, 0.0]);
        let sol = solve_betas(&spec, 1.0, DEFAULT_TOL_SOLVE).unwrap();
        prop_assert!(sol.consistent);
        let p = BubbleParams::from_spec(&spec, 1.0, None).unwrap();
        prop_assert!(p.identity_residuals(&spec).unwrap().max_abs() <= 1e-10);
    }
}
