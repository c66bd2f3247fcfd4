use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::recursion::{ExpansionCoeffs, ProblemCoefficients};

/// Kernel value `p_j(t, x; y)` with its log and spatial gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub log_value: f64,
    pub gradient: Vec<f64>,
    pub component: usize,
}

/// PDE residual of the truncated kernel, per component.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub raw: Vec<f64>,
    /// `raw[i] / p_i`.
    pub relative: Vec<f64>,
}

fn check_inputs(exp: &ExpansionCoeffs, t: f64, x: &[f64], y: &[f64], j: usize) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::Parameter(format!(
            "kernel time must be positive, got {t}; as t -> 0 the kernel tends to the point mass at y"
        )));
    }
    if x.len() != exp.center().len() || y.len() != x.len() {
        return Err(Error::Structural("kernel point dimension mismatch".into()));
    }
    if y != exp.center() {
        return Err(Error::Structural(format!(
            "expansion is centered at {:?}, kernel requested at y = {y:?}",
            exp.center()
        )));
    }
    if j >= exp.components() {
        return Err(Error::Parameter(format!("component {j} out of range")));
    }
    Ok(())
}

fn gaussian_log(t: f64, dx: &[f64]) -> f64 {
    let n = dx.len() as f64;
    let r2: f64 = dx.iter().map(|v| v * v).sum();
    -0.5 * n * (4.0 * PI * t).ln() - r2 / (4.0 * t)
}

/// Evaluates `(4πt)^{−n/2} exp(−|Δx|²/4t + W_j)` in log space; `t` is the physical time
/// elapsed since the expansion's time origin.
pub fn eval_kernel(exp: &ExpansionCoeffs, t: f64, x: &[f64], y: &[f64], j: usize) -> Result<KernelValue> {
    check_inputs(exp, t, x, y, j)?;
    let dx: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let c = exp.correction(j, t, x);
    let log_value = gaussian_log(t, &dx) + c.w;
    let value = log_value.exp();
    let gradient = dx
        .iter()
        .zip(&c.grad)
        .map(|(d, g)| (-d / (2.0 * t) + g) * value)
        .collect();
    Ok(KernelValue {
        value,
        log_value,
        gradient,
        component: j,
    })
}

/// `∇_x p_j = (−Δx/2t + ∇W_j) p_j`.
pub fn kernel_gradient(exp: &ExpansionCoeffs, t: f64, x: &[f64], y: &[f64], j: usize) -> Result<Vec<f64>> {
    Ok(eval_kernel(exp, t, x, y, j)?.gradient)
}

/// `ν · ∇_x p_j` for a unit vector `ν`.
pub fn normal_derivative(exp: &ExpansionCoeffs, t: f64, x: &[f64], y: &[f64], nu: &[f64], j: usize) -> Result<f64> {
    let norm: f64 = nu.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nu.len() != x.len() || (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Parameter(
            "normal must be a unit vector of matching dimension".into(),
        ));
    }
    let g = kernel_gradient(exp, t, x, y, j)?;
    Ok(g.iter().zip(nu).map(|(a, b)| a * b).sum())
}

/// `r_i = ∂_t p_i − Δp_i − Σ_{jk} b^i_{jk} ∂_k p_j − V_i p_i`, assembled from the series
/// so that the singular Gaussian terms cancel analytically.
///
/// Coefficients are evaluated at physical time `origin + t`.
pub fn residual(exp: &ExpansionCoeffs, pc: &ProblemCoefficients, t: f64, x: &[f64], y: &[f64]) -> Result<Residual> {
    check_inputs(exp, t, x, y, 0)?;
    if pc.components() != exp.components() || pc.dim() != x.len() {
        return Err(Error::Structural("problem and expansion disagree".into()));
    }
    let time = exp.time_origin() + t;
    let dx: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let m = exp.components();
    let corr: Vec<_> = (0..m).map(|j| exp.correction(j, t, x)).collect();
    let mut raw = Vec::with_capacity(m);
    let mut relative = Vec::with_capacity(m);
    for i in 0..m {
        let c = &corr[i];
        let dx_grad: f64 = dx.iter().zip(&c.grad).map(|(d, g)| d * g).sum();
        let grad2: f64 = c.grad.iter().map(|g| g * g).sum();
        // (∂_t p − Δp)/p = ∂_t W + Δx·∇W/t − |∇W|² − ΔW.
        let mut r = c.dt + dx_grad / t - grad2 - c.laplacian;
        for (key, _) in pc.drift().iter().filter(|(k, _)| k.equation == i) {
            let b = pc.drift_value(i, key.component, key.axis, time, x);
            let other = &corr[key.component];
            let ratio = (other.w - c.w).exp();
            let g = -dx[key.axis] / (2.0 * t) + other.grad[key.axis];
            r -= b * ratio * g;
        }
        r -= pc.potential_value(i, time, x);
        let p = (gaussian_log(t, &dx) + c.w).exp();
        raw.push(r * p);
        relative.push(r);
    }
    Ok(Residual { raw, relative })
}

/// `−4t log p − 2nt ln(4πt) = |Δx|² − 4tW` for each `t`.
pub fn varadhan_diag(exp: &ExpansionCoeffs, ts: &[f64], x: &[f64], y: &[f64], j: usize) -> Result<Vec<f64>> {
    let n = x.len() as f64;
    ts.iter()
        .map(|&t| {
            let k = eval_kernel(exp, t, x, y, j)?;
            Ok(-4.0 * t * k.log_value - 2.0 * n * t * (4.0 * PI * t).ln())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{CoefficientFn, SpatialFn};
    use crate::recursion::{expand, BoxDomain, ExpansionConfig, WarpParams};

    fn scalar(b: CoefficientFn) -> ProblemCoefficients {
        ProblemCoefficients::scalar(BoxDomain::cube(1, 1.0).unwrap(), vec![b]).unwrap()
    }

    #[test]
    fn free_gaussian_normalized_at_origin() {
        let pc = scalar(CoefficientFn::constant(1, 0.0));
        let e = expand(&pc, &[0.2], &ExpansionConfig::new(2, 4, WarpParams::plain())).unwrap();
        let t = 1.0 / (4.0 * PI);
        let k = eval_kernel(&e, t, &[0.2], &[0.2], 0).unwrap();
        assert!((k.value - 1.0).abs() < 1e-15);
        assert_eq!(k.gradient, vec![0.0]);
        assert!(eval_kernel(&e, 0.0, &[0.2], &[0.2], 0).is_err());
        assert!(eval_kernel(&e, 0.1, &[0.2], &[0.3], 0).is_err());
    }

    #[test]
    fn constant_drift_gradient_ratio() {
        let pc = scalar(CoefficientFn::constant(1, 0.7));
        let e = expand(&pc, &[0.0], &ExpansionConfig::new(2, 4, WarpParams::plain())).unwrap();
        let (t, x) = (0.5, 0.3);
        let k = eval_kernel(&e, t, &[x], &[0.0], 0).unwrap();
        assert!((k.gradient[0] / k.value - (-x / (2.0 * t) - 0.35)).abs() < 1e-14);
        let r = residual(&e, &pc, t, &[x], &[0.0]).unwrap();
        assert!(r.relative[0].abs() < 1e-13);
        let nd = normal_derivative(&e, t, &[x], &[0.0], &[-1.0], 0).unwrap();
        assert!((nd + k.gradient[0]).abs() < 1e-16);
    }

    #[test]
    fn sine_gradient_matches_differences() {
        let pc = scalar(CoefficientFn::stationary(SpatialFn::sine(1, 0.3, 0, 1.0, 0.0)));
        let e = expand(&pc, &[0.1], &ExpansionConfig::new(4, 12, WarpParams::plain())).unwrap();
        let (t, x, h) = (0.05, 0.3, 1e-5);
        let g = kernel_gradient(&e, t, &[x], &[0.1], 0).unwrap()[0];
        let v = |x: f64| eval_kernel(&e, t, &[x], &[0.1], 0).unwrap().value;
        let fd = (v(x + h) - v(x - h)) / (2.0 * h);
        assert!((g - fd).abs() < 1e-6 * g.abs());
    }

    #[test]
    fn varadhan_constant_drift() {
        let pc = scalar(CoefficientFn::constant(1, 0.7));
        let e = expand(&pc, &[0.0], &ExpansionConfig::new(2, 4, WarpParams::plain())).unwrap();
        let ts = [1e-2, 1e-3];
        let v = varadhan_diag(&e, &ts, &[0.4], &[0.0], 0).unwrap();
        for (t, d) in ts.iter().zip(v) {
            let want = 0.16 + 4.0 * t * (0.7 * 0.4 / 2.0 + 0.49 * t / 4.0);
            assert!((d - want).abs() < 1e-14);
        }
    }
}
