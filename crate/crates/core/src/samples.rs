//! Deterministic sample sets: seeded directions, polar grids, spheres, lattices.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::geometry::{add_scaled, norm};

pub const DEFAULT_SEED: u64 = 0x5eed_b0bb1e;

fn gaussian_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let len = norm(&v);
        if len > 1e-8 {
            return v.into_iter().map(|c| c / len).collect();
        }
    }
}

/// Unit vectors uniformly spread over the whole sphere `S^{N−1}`.
pub fn sphere_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| gaussian_unit(&mut rng, n)).collect()
}

/// Unit vectors with non-negative last coordinate. Every fourth one lies in
/// the boundary hyperplane, and the coordinate axes (with `+e_N`) come first.
pub fn half_sphere_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirs = Vec::with_capacity(count);
    let mut e = vec![0.0; n];
    e[n - 1] = 1.0;
    dirs.push(e);
    for k in 0..n - 1 {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        dirs.push(e.clone());
        e[k] = -1.0;
        dirs.push(e);
    }
    while dirs.len() < count {
        let mut v = gaussian_unit(&mut rng, n);
        if dirs.len() % 4 == 0 {
            v[n - 1] = 0.0;
        } else {
            v[n - 1] = v[n - 1].abs();
        }
        let len = norm(&v);
        if len > 1e-8 {
            dirs.push(v.into_iter().map(|c| c / len).collect());
        }
    }
    dirs.truncate(count);
    dirs
}

/// Geometric radii from `r_min` to `r_max` inclusive.
pub fn geometric_radii(r_min: f64, r_max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![r_min];
    }
    let ratio = (r_max / r_min).ln() / (count - 1) as f64;
    (0..count).map(|k| r_min * (ratio * k as f64).exp()).collect()
}

/// Polar grid in the closed half-space about a boundary point: geometric
/// radii times half-sphere directions.
pub fn polar_grid(center: &[f64], r_min: f64, r_max: f64, n_radii: usize, n_dirs: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = center.len();
    let dirs = half_sphere_directions(n, n_dirs, seed);
    let mut pts = Vec::with_capacity(n_radii * n_dirs);
    for r in geometric_radii(r_min, r_max, n_radii) {
        for d in &dirs {
            let mut p = add_scaled(center, r, d);
            p[n - 1] = p[n - 1].max(0.0);
            pts.push(p);
        }
    }
    pts
}

/// Points on the full sphere of radius `radius` about `center`.
pub fn sphere_points(center: &[f64], radius: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    sphere_directions(center.len(), count, seed)
        .iter()
        .map(|d| add_scaled(center, radius, d))
        .collect()
}

/// Uniform random points in the box `[lo, hi]` (per axis).
pub fn box_points(lo: &[f64], hi: &[f64], count: usize, seed: u64) -> Vec<Vec<f64>> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            lo.iter()
                .zip(hi)
                .map(|(a, b)| if a == b { *a } else { rng.random_range(*a..*b) })
                .collect()
        })
        .collect()
}

/// Cell-centred lattice with `per_axis` points along each axis of `[lo, hi]`.
pub fn cell_lattice(lo: &[f64], hi: &[f64], per_axis: usize) -> Vec<Vec<f64>> {
    let n = lo.len();
    let total = per_axis.pow(n as u32);
    (0..total)
        .map(|idx| {
            let mut rem = idx;
            (0..n)
                .map(|k| {
                    let i = rem % per_axis;
                    rem /= per_axis;
                    lo[k] + (hi[k] - lo[k]) * (i as f64 + 0.5) / per_axis as f64
                })
                .collect()
        })
        .collect()
}
