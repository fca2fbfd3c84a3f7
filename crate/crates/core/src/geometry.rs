//! Small helpers for points stored as `&[f64]`.

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add_scaled(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    norm2(a).sqrt()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

/// Unit vector along axis `k` in `n` dimensions.
pub fn unit(n: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[k] = 1.0;
    e
}

/// Inversion of `y` in the sphere of radius `radius` about `center`.
///
/// Returns `None` when `y` coincides with the center (to 1e-300).
pub fn invert(center: &[f64], radius: f64, y: &[f64]) -> Option<Vec<f64>> {
    let diff = sub(y, center);
    let r2 = norm2(&diff);
    if r2.sqrt() < 1e-300 {
        return None;
    }
    let s = radius * radius / r2;
    Some(add_scaled(center, s, &diff))
}

/// `Π_j exp(e_j log v_j)` evaluated in log space.
pub fn log_product(exponents: &[f64], log_values: &[f64]) -> f64 {
    exponents
        .iter()
        .zip(log_values)
        .map(|(e, l)| if *e == 0.0 { 0.0 } else { e * l })
        .sum::<f64>()
        .exp()
}

/// `Π_j v_j^{e_j}` for non-negative `v_j`, computed in log space.
pub fn power_product(exponents: &[f64], values: &[f64]) -> f64 {
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    log_product(exponents, &logs)
}
