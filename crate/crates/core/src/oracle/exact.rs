use crate::error::{Error, Result};

/// Fundamental solution of `∂_t u = u_xx + (b0 + b1 t) u_x` in one dimension, obtained by
/// following characteristics: `(4πt)^{−1/2} exp(−(Δx + b0 t + b1 t²/2)² / 4t)`.
pub fn exact_const_drift_kernel(b0: f64, b1: f64, t: f64, x: f64, y: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("kernel time must be positive, got {t}")));
    }
    let shift = (x - y) + b0 * t + 0.5 * b1 * t * t;
    Ok((4.0 * std::f64::consts::PI * t).sqrt().recip() * (-shift * shift / (4.0 * t)).exp())
}

/// The exponent of [`exact_const_drift_kernel`] minus the free Gaussian part, regrouped as
/// `Σ_k c_k t^k` with time-dependent `c_k`: returns `[c_0, c_1, c_2, c_3]` at `(t, Δx)`.
pub fn const_drift_coefficients(b0: f64, b1: f64, t: f64, dx: f64) -> [f64; 4] {
    let b = b0 + b1 * t;
    [
        -b * dx / 2.0,
        b1 * dx / 4.0 - b * b / 4.0,
        b * b1 / 4.0,
        -b1 * b1 / 16.0,
    ]
}

/// `(4πt)^{−1/2} e^{−Δx²/4t} e^{V t}`: heat kernel with constant potential.
pub fn exact_potential_kernel(v: f64, t: f64, x: f64, y: f64) -> Result<f64> {
    Ok(exact_const_drift_kernel(0.0, 0.0, t, x, y)? * (v * t).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_drift_is_gaussian() {
        let t = 1.0 / (4.0 * std::f64::consts::PI);
        assert!((exact_const_drift_kernel(0.0, 0.0, t, 0.3, 0.3).unwrap() - 1.0).abs() < 1e-15);
        assert!(exact_const_drift_kernel(0.0, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn coefficients_reassemble_exponent() {
        let (b0, b1) = (0.3, 0.5);
        for &(t, dx) in &[(0.1, 0.2), (0.7, -0.9), (1.0, 1.3)] {
            let c = const_drift_coefficients(b0, b1, t, dx);
            let series: f64 = c.iter().enumerate().map(|(k, v)| v * f64::powi(t, k as i32)).sum();
            let p = exact_const_drift_kernel(b0, b1, t, dx, 0.0).unwrap();
            let gauss = exact_const_drift_kernel(0.0, 0.0, t, dx, 0.0).unwrap();
            assert!(((p / gauss).ln() - series).abs() < 1e-14);
        }
    }

    #[test]
    fn satisfies_pde() {
        let (b0, b1) = (0.3, 0.5);
        let h = 1e-4;
        let mut state = 12345u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let t = 0.2 + 0.8 * next();
            let x = -1.0 + 2.0 * next();
            let p = |t: f64, x: f64| exact_const_drift_kernel(b0, b1, t, x, 0.0).unwrap();
            let pt = (p(t + h, x) - p(t - h, x)) / (2.0 * h);
            let px = (p(t, x + h) - p(t, x - h)) / (2.0 * h);
            let pxx = (p(t, x + h) - 2.0 * p(t, x) + p(t, x - h)) / (h * h);
            let r = pt - pxx - (b0 + b1 * t) * px;
            assert!(r.abs() <= 1e-6 * p(t, x).max(1e-3), "{r}");
        }
    }
}
