use std::num::NonZeroUsize;

use gauss_quad::{GaussHermite, GaussLegendre};

use crate::error::{Error, Result};

const MAX_INTERVALS: usize = 200_000;

struct Pair {
    low: Vec<(f64, f64)>,
    high: Vec<(f64, f64)>,
}

impl Pair {
    fn new() -> Self {
        let rule = |n: usize| {
            GaussLegendre::new(NonZeroUsize::new(n).expect("nonzero"))
                .as_node_weight_pairs()
                .to_vec()
        };
        Pair {
            low: rule(15),
            high: rule(30),
        }
    }

    fn apply(rule: &[(f64, f64)], a: f64, b: f64, g: &impl Fn(f64) -> f64) -> f64 {
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        rule.iter().map(|&(x, w)| w * g(m + h * x)).sum::<f64>() * h
    }
}

/// Adaptive bisection with a 15/30-point Gauss–Legendre error estimate.
fn adaptive(g: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, pair: &Pair, budget: &mut usize) -> Result<f64> {
    let mut stack = vec![(a, b)];
    let mut total = 0.0;
    let width = b - a;
    while let Some((lo, hi)) = stack.pop() {
        if *budget == 0 {
            return Err(Error::Accuracy("quadrature budget exhausted".into()));
        }
        *budget -= 1;
        let coarse = Pair::apply(&pair.low, lo, hi, g);
        let fine = Pair::apply(&pair.high, lo, hi, g);
        let share = tol * (hi - lo) / width;
        let floor = 16.0 * f64::EPSILON * fine.abs();
        if (fine - coarse).abs() <= share.max(floor) || hi - lo < 1e-15 * width.max(1e-300) {
            total += fine;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi));
            stack.push((lo, mid));
        }
    }
    Ok(total)
}

/// `∫_0^1 s^{a−1} f(s) ds` to absolute accuracy `tol`.
///
/// For `a < 1` the mesh is graded geometrically toward `s = 0`, and the innermost piece is
/// taken from the leading term `f(0) ε^a / a`.
pub fn quad_ray(f: impl Fn(f64) -> f64, a: f64, tol: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Parameter(format!("ray exponent must be positive, got {a}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Parameter("tolerance must be positive".into()));
    }
    let g = |s: f64| s.powf(a - 1.0) * f(s);
    let pair = Pair::new();
    let mut budget = MAX_INTERVALS;
    if a >= 1.0 {
        return adaptive(&g, 0.0, 1.0, tol, &pair, &mut budget);
    }
    let scale = f(0.0).abs().max(1.0);
    let eps = (0.01 * tol * a / scale).powf(1.0 / a);
    let mut total = f(0.0) * eps.powf(a) / a;
    let mut hi = 1.0;
    let pieces = ((1.0 / eps).log2().ceil() as usize).max(1);
    let piece_tol = 0.99 * tol / pieces as f64;
    while hi > eps {
        let lo = (0.5 * hi).max(eps);
        total += adaptive(&g, lo, hi, piece_tol, &pair, &mut budget)?;
        hi = lo;
    }
    Ok(total)
}

/// `∫ (4πt)^{−n/2} e^{−|x−y|²/4t} g(y) dy` by tensor Gauss–Hermite with `y = x + 2√t z`.
pub fn gh_convolve(g: impl Fn(&[f64]) -> f64, x: &[f64], t: f64, order: usize) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Parameter("convolution time must be positive".into()));
    }
    let order = NonZeroUsize::new(order).ok_or_else(|| Error::Parameter("order must be >= 1".into()))?;
    let rule = GaussHermite::new(order);
    let pairs = rule.as_node_weight_pairs();
    let n = x.len();
    let scale = 2.0 * t.sqrt();
    let norm = std::f64::consts::PI.powf(-(n as f64) / 2.0);
    let mut idx = vec![0usize; n];
    let mut y = vec![0.0; n];
    let mut sum = 0.0;
    loop {
        let mut w = 1.0;
        for d in 0..n {
            let (z, wz) = pairs[idx[d]];
            y[d] = x[d] + scale * z;
            w *= wz;
        }
        sum += w * g(&y);
        let mut d = 0;
        loop {
            if d == n {
                return Ok(norm * sum);
            }
            idx[d] += 1;
            if idx[d] < pairs.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ray_closed_forms() {
        assert!((quad_ray(|_| 1.0, 1.0, 1e-14).unwrap() - 1.0).abs() < 1e-14);
        assert!((quad_ray(|s| s * s, 1.0, 1e-14).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        assert!((quad_ray(|_| 1.0, 0.5, 1e-13).unwrap() - 2.0).abs() < 1e-12);
        assert!((quad_ray(|s| s, 4.0, 1e-14).unwrap() - 0.2).abs() < 1e-14);
        assert!(quad_ray(|_| 1.0, 0.0, 1e-12).is_err());
    }

    #[test]
    fn ray_monomial_table() {
        for m in 0..=16 {
            for &a in &[0.25, 0.5, 1.0, 2.0, 7.0, 8.0] {
                let v = quad_ray(|s| s.powi(m), a, 1e-14).unwrap();
                assert!((v - 1.0 / (m as f64 + a)).abs() < 1e-13, "m={m} a={a}");
            }
        }
    }

    #[test]
    fn gaussian_moments() {
        let t = 0.3;
        assert!((gh_convolve(|_| 1.0, &[0.0], t, 40).unwrap() - 1.0).abs() < 1e-13);
        assert!((gh_convolve(|y| y[0] * y[0], &[0.0], t, 40).unwrap() - 2.0 * t).abs() < 1e-13);
        assert!((gh_convolve(|y| y[0].exp(), &[0.0], t, 40).unwrap() - t.exp()).abs() < 1e-13);
        let v = gh_convolve(|y| y[0] * y[1], &[1.0, 2.0], t, 10).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
    }
}
