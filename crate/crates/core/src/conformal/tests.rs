use super::*;
use crate::bubble::BubbleParams;
use crate::field::Field;
use crate::fixtures;
use crate::geometry::unit;
use crate::ode::closed_form_psi;

fn half_space_samples(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut lo = vec![-20.0; n];
    let mut hi = vec![20.0; n];
    lo[n - 1] = 1e-3;
    hi[n - 1] = 30.0;
    samples::box_points(&lo, &hi, count, seed)
}

#[test]
fn t_map_examples() {
    let s = ConformalSetup::new(vec![1.0, -2.0, 0.0], 1.5).unwrap();
    let tq = t_map(&s, &s.q).unwrap();
    assert!(dist(&tq, &s.q) < 1e-14);
    let tx = t_map(&s, &s.xbar).unwrap();
    let expect = add_scaled(&s.xbar, 3.0 * s.d, &unit(3, 2));
    assert!(dist(&tx, &expect) < 1e-13);
    assert!(matches!(t_map(&s, &s.p), Err(Error::SingularPoint { .. })));
    let y = [0.3, 0.7, 2.0];
    assert!(dist(&t_map(&s, &t_map(&s, &y).unwrap()).unwrap(), &y) < 1e-14);
}

#[test]
fn setup_validation() {
    assert!(ConformalSetup::new(vec![0.0, 0.0, 1.0], 1.0).is_err());
    assert!(ConformalSetup::new(vec![0.0, 0.0, 0.0], 0.0).is_err());
    let p = fixtures::scalar_negative().params().unwrap();
    let s = ConformalSetup::from_params(&p).unwrap();
    assert!((s.d - 2.0).abs() < 1e-14);
}

#[test]
fn properties_hold_on_ten_thousand_samples() {
    for f in fixtures::standard() {
        let p = f.params().unwrap();
        let s = ConformalSetup::from_params(&p).unwrap();
        let n = s.dim();
        let mut xs = vec![vec![0.0; n], unit(n, 0)];
        let mut x3 = vec![0.0; n];
        x3[0] = 3.0;
        x3[1] = 4.0;
        xs.push(x3);
        let ys = half_space_samples(n, 10_000, 11);
        let rep = verify_t_properties(&s, &xs, &ys).unwrap();
        assert!(rep.passed, "{}: {:?}", f.name, rep.properties);
        assert_eq!(rep.properties.len(), 5);
        assert!(rep.properties[0].max_violation <= 1e-13);
    }
}

#[test]
fn far_sample_and_origin_normal() {
    let s = ConformalSetup::new(vec![0.0; 3], 1.0).unwrap();
    assert!(dist(&s.hyperplane_normal(&[0.0, 0.0, 0.0]), &unit(3, 2)) < 1e-15);
    let far = vec![vec![0.5, -0.5, 1e6]];
    let rep = verify_t_properties(&s, &[vec![0.0; 3]], &far).unwrap();
    // involution at |y| ~ 1e6 is limited by rounding of P + O(1e−6); only (ii) is claimed here
    assert!(rep.properties[1].passed && rep.properties[2].passed, "{:?}", rep.properties);
    let z = t_map(&s, &far[0]).unwrap();
    assert!(dist(&z, &s.p) < 1e-5);
    assert!(verify_t_properties(&s, &[], &[vec![0.0, 0.0, -1.0]]).is_err());
}

#[test]
fn transformed_bubble_is_radial_about_q() {
    for f in fixtures::standard() {
        let p = f.params().unwrap();
        let s = ConformalSetup::from_params(&p).unwrap();
        let v = BallField {
            inner: p.clone(),
            setup: s.clone(),
        };
        let vq = v.eval(&s.q);
        let uq = p.eval(&s.q);
        for (a, b) in vq.iter().zip(&uq) {
            assert!((a - b).abs() < 1e-13 * b, "{}", f.name);
        }
        let radii: Vec<f64> = (1..=9).map(|k| 0.2 * k as f64 * s.d).collect();
        for dev in verify_radial(&s, &v, &radii, 200).unwrap() {
            assert!(dev < 1e-12, "{}: {dev}", f.name);
        }
        // continuity at P
        let n = s.dim();
        let mut near = s.p.clone();
        near[n - 1] += 1e-3 * s.d;
        let ext = v.eval(&s.p);
        for (a, b) in v.eval(&near).iter().zip(&ext) {
            assert!((a - b).abs() < 1e-2 * b);
        }
        let scale = 2f64.powi(2 - n as i32);
        assert!((ext[0] - scale * p.eval(&s.xbar)[0]).abs() < 1e-15);
    }
}

#[test]
fn perturbed_center_is_not_radial() {
    let p = fixtures::scalar_negative().params().unwrap();
    let s = ConformalSetup::from_params(&p).unwrap();
    let mut moved = p.clone();
    moved.y0[0] += 0.3;
    let v = BallField {
        inner: moved,
        setup: s.clone(),
    };
    let dev = verify_radial(&s, &v, &[0.5 * s.d, s.d], 200).unwrap();
    assert!(dev.iter().all(|d| *d > 1e-4), "{dev:?}");
}

#[test]
fn ball_residual_converges_at_order_two() {
    for f in fixtures::standard() {
        let p = f.params().unwrap();
        let s = ConformalSetup::from_params(&p).unwrap();
        let v = BallField {
            inner: p.clone(),
            setup: s.clone(),
        };
        let (interior, boundary) = ball_samples(&s, 60, 60, 0.15 * s.d, 3);
        let hs = [4e-2, 2e-2, 1e-2, 5e-3];
        let reps: Vec<_> = hs
            .iter()
            .map(|&h| ball_system_residual(&f.spec, &s, &v, &interior, &boundary, h * s.d).unwrap())
            .collect();
        let inner: Vec<f64> = reps.iter().map(|r| r.max_interior()).collect();
        let bnd: Vec<f64> = reps.iter().map(|r| r.max_boundary()).collect();
        let si = fd::fit_log_slope(&hs, &inner, 0.0).slope().unwrap();
        let sb = fd::fit_log_slope(&hs, &bnd, 0.0).slope().unwrap();
        assert!((si - 2.0).abs() < 0.1, "{} interior {si} {inner:?}", f.name);
        assert!((sb - 2.0).abs() < 0.1, "{} boundary {sb} {bnd:?}", f.name);
    }
}

#[test]
fn ball_residual_detects_wrong_amplitude() {
    let f = fixtures::scalar_negative();
    let p = f.params().unwrap();
    let s = ConformalSetup::from_params(&p).unwrap();
    let mut bad = p.clone();
    bad.betas[0] *= 1.3;
    let v = BallField {
        inner: bad,
        setup: s.clone(),
    };
    let (interior, boundary) = ball_samples(&s, 40, 40, 0.05 * s.d, 5);
    let rep = ball_system_residual(&f.spec, &s, &v, &interior, &boundary, 1e-3).unwrap();
    assert!(rep.max_interior() > 1e-2 && rep.max_boundary() > 1e-2);
    let too_close = vec![add_scaled(&s.q, 2.0 * s.d - 1e-4, &unit(3, 0))];
    assert!(matches!(
        ball_system_residual(&f.spec, &s, &v, &too_close, &[], 1e-3),
        Err(Error::StencilOutOfDomain { .. })
    ));
}

#[test]
fn mu_alpha_recovery() {
    let f = fixtures::scalar_neumann();
    let p = f.params().unwrap();
    let s = ConformalSetup::from_params(&p).unwrap();
    let ma = recover_mu_alpha(&s, &p).unwrap();
    assert!((ma.t - 0.5).abs() < 1e-15);
    assert!((ma.mu - 2.0 * s.d).abs() < 1e-14);

    let f = fixtures::scalar_negative();
    let p = f.params().unwrap();
    let s = ConformalSetup::from_params(&p).unwrap();
    let ma = recover_mu_alpha(&s, &p).unwrap();
    let t_expect = (1.0 - 3f64.sqrt() / 2.0) / 2.0;
    assert!((ma.t - t_expect).abs() < 1e-14, "{}", ma.t);

    for f in fixtures::standard().into_iter().chain([fixtures::coupled_degenerate()]) {
        let p = f.params().unwrap();
        let s = ConformalSetup::from_params(&p).unwrap();
        let ma = recover_mu_alpha(&s, &p).unwrap();
        for r in alpha_condition_residuals(&f.spec, &ma.alphas, ma.mu) {
            assert!(r.abs() <= 1e-10, "{}: {r}", f.name);
        }
        let v = BallField {
            inner: p.clone(),
            setup: s.clone(),
        };
        let n = s.dim();
        let dirs = samples::sphere_directions(n, 100, 17);
        for (k, dir) in dirs.iter().enumerate() {
            let r = 2.0 * s.d * (k as f64 + 0.5) / 100.0;
            let z = add_scaled(&s.q, r, dir);
            let exact = closed_form_psi(n, &ma.alphas, ma.mu, r);
            for (a, b) in v.eval(&z).iter().zip(&exact) {
                assert!((a - b).abs() <= 1e-10 * b, "{}: {a} vs {b}", f.name);
            }
        }
    }
}

#[test]
fn mu_alpha_rejects_mismatched_setup() {
    let p = fixtures::scalar_negative().params().unwrap();
    let s = ConformalSetup::new(vec![0.0; 3], 1.0).unwrap();
    assert!(matches!(recover_mu_alpha(&s, &p), Err(Error::InvalidArgument(_))));
    let weird = BubbleParams {
        sigma: 1.0,
        betas: vec![1.0],
        y0: vec![0.0, 0.0, 0.0],
    };
    let sw = ConformalSetup::from_params(&weird).unwrap();
    assert!((recover_mu_alpha(&sw, &weird).unwrap().t - 0.5).abs() < 1e-15);
}

#[test]
fn reflection_is_an_involution() {
    let s = ConformalSetup::new(vec![0.0, 1.0, 0.0], 2.0).unwrap();
    let x = [3.0, -1.0, 0.0];
    let z = [0.5, 1.5, 2.5];
    assert!(dist(&s.reflect(&x, &s.reflect(&x, &z)), &z) < 1e-14);
    assert!(dist(&s.reflect(&x, &s.q), &s.q) < 1e-15);
}
