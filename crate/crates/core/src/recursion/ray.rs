use crate::error::{Error, Result};
use crate::polyalg::{binomial, MultiIndex, TaylorPoly, TimeJet};

use super::warp::WarpMode;

/// `∫_0^1 s^{a−1} P(y + sΔx) ds` for a polynomial `P` in `Δx`: coefficient `c_γ`
/// becomes `c_γ / (|γ| + a)`.
///
/// Solves `a c + Δx·∇c = P`; requires `a > 0`.
pub fn ray_integrate(p: &TaylorPoly, a: f64) -> Result<TaylorPoly> {
    check_exponent(a)?;
    Ok(p.map_by_order(|order, c| c / (f64::from(order) + a)))
}

/// [`ray_integrate`] applied to every time term of a jet.
pub fn ray_integrate_jet(p: &TimeJet, a: f64) -> Result<TimeJet> {
    check_exponent(a)?;
    p.map_terms(|t| ray_integrate(t, a))
}

fn check_exponent(a: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Parameter(format!("ray exponent must be positive, got {a}")));
    }
    Ok(())
}

/// Ray exponent `a` in the per-mode weight `1/(|γ| + a)` attached to order `k`:
/// `k` (plain), `k/β` (beta) and `(1−τ)k/β` (tau).
pub fn ray_exponent(mode: WarpMode, k: usize, beta: f64, tau: f64) -> f64 {
    let k = k as f64;
    match mode {
        WarpMode::Plain => k,
        WarpMode::Beta => k / beta,
        WarpMode::Tau => (1.0 - tau) * k / beta,
    }
}

/// Weight `1/(|γ| + a)` with `a` from [`ray_exponent`]. In tau mode this equals
/// `β / (β|γ| + (1−τ)k)`.
pub fn ray_weight(mode: WarpMode, order: u32, k: usize, beta: f64, tau: f64) -> f64 {
    match mode {
        WarpMode::Tau => beta / (beta * f64::from(order) + (1.0 - tau) * k as f64),
        _ => 1.0 / (f64::from(order) + ray_exponent(mode, k, beta, tau)),
    }
}

/// `∫_0^1 s^{a−1} (y + sΔx)^γ ds` expanded in `Δx`:
/// `Σ_{δ≤γ} Π_i C(γ_i, δ_i) y^{γ−δ} Δx^δ / (|δ| + a)`.
pub fn pk_gamma(gamma: &MultiIndex, a: f64, y: &[f64], dx: &[f64]) -> Result<f64> {
    check_exponent(a)?;
    if gamma.dim() != y.len() || y.len() != dx.len() {
        return Err(Error::Structural("pk_gamma dimension mismatch".into()));
    }
    let mut sum = 0.0;
    for delta in gamma.sub_indices() {
        let mut term = 1.0 / (f64::from(delta.order()) + a);
        for (i, (&g, &d)) in gamma.entries().iter().zip(delta.entries()).enumerate() {
            term *= binomial(g, d) * y[i].powi((g - d) as i32) * dx[i].powi(d as i32);
        }
        sum += term;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::MonomialBasis;

    #[test]
    fn scales_by_order() {
        let basis = MonomialBasis::new(2, 3).unwrap();
        let g = MultiIndex::new(vec![1, 1]).unwrap();
        let p = TaylorPoly::from_terms(&basis, &[0.0, 0.0], [(g.clone(), 6.0)]).unwrap();
        let q = ray_integrate(&p, 1.0).unwrap();
        assert_eq!(q.coeff(&g), 2.0);
        assert!(ray_integrate(&p, 0.0).is_err());
        assert!(ray_integrate(&p, -1.0).is_err());
    }

    #[test]
    fn solves_transport_equation() {
        // a c + Δx·∇c = P.
        let basis = MonomialBasis::new(2, 4).unwrap();
        let p = TaylorPoly::from_terms(
            &basis,
            &[0.3, -0.2],
            [
                (MultiIndex::new(vec![0, 0]).unwrap(), 1.5),
                (MultiIndex::new(vec![2, 1]).unwrap(), -0.7),
                (MultiIndex::new(vec![0, 4]).unwrap(), 0.25),
            ],
        )
        .unwrap();
        let c = ray_integrate(&p, 2.5).unwrap();
        let mut lhs = c.scale(2.5);
        lhs.axpy(1.0, &c.euler()).unwrap();
        assert!(lhs.max_abs_diff(&p).unwrap() < 1e-15);
    }

    #[test]
    fn pk_gamma_small_case() {
        // γ = (1), a = 1: y/1 + Δx/2.
        let g = MultiIndex::new(vec![1]).unwrap();
        let v = pk_gamma(&g, 1.0, &[0.4], &[0.6]).unwrap();
        assert!((v - (0.4 + 0.3)).abs() < 1e-15);
    }

    #[test]
    fn tau_weight_form() {
        let w = ray_weight(WarpMode::Tau, 3, 2, 0.5, 0.25);
        assert!((w - 0.5 / (1.5 + 1.5)).abs() < 1e-15);
        let a = ray_exponent(WarpMode::Tau, 2, 0.5, 0.25);
        assert!((w - 1.0 / (3.0 + a)).abs() < 1e-15);
        assert_eq!(ray_weight(WarpMode::Plain, 3, 2, 0.5, 0.25), 0.2);
    }
}
