use crate::error::Result;

use super::expand::compute_c0;
use super::problem::ProblemCoefficients;
use super::warp::WarpParams;

pub const BETA_FLOOR: f64 = 1e-6;

/// Result of [`select_beta`].
#[derive(Clone, Debug)]
pub struct BetaSelection {
    pub params: WarpParams,
    /// `c_0^{up}` after flooring at `n² R C`.
    pub c0_up: f64,
    /// Largest `|c_0|` seen on the sampling lattice.
    pub c0_sampled: f64,
    /// The admissible bound `1/(12 n² C² (c_0^{up})²)`.
    pub bound: f64,
    pub lattice_points: usize,
}

/// `1/(12 n² C² c0up²)`.
pub fn beta_bound(dim: usize, bound_c: f64, c0_up: f64) -> f64 {
    let n2 = (dim * dim) as f64;
    1.0 / (12.0 * n2 * bound_c * bound_c * c0_up * c0_up)
}

/// Half of [`beta_bound`], clamped to `[1e-6, 1]`; `1` when `c0_up = 0`.
pub fn beta_from_bound(dim: usize, bound_c: f64, c0_up: f64) -> f64 {
    if c0_up == 0.0 {
        return 1.0;
    }
    (0.5 * beta_bound(dim, bound_c, c0_up)).clamp(BETA_FLOOR, 1.0)
}

/// Beta-mode parameters from a lattice estimate of `sup |c_0|` over `Ω × Ω`.
pub fn select_beta(pc: &ProblemCoefficients) -> Result<BetaSelection> {
    let n = pc.dim();
    if pc.is_drift_free() {
        return Ok(BetaSelection {
            params: WarpParams::beta(1.0)?,
            c0_up: 0.0,
            c0_sampled: 0.0,
            bound: f64::INFINITY,
            lattice_points: 0,
        });
    }
    // 17 points per axis, thinned in high dimension to keep |Ω × Ω| samples manageable.
    let per_axis = ((17f64.powi(2)).powf(1.0 / n as f64).floor() as usize).clamp(3, 17);
    let pts = pc.domain().lattice(per_axis);
    let mut sampled: f64 = 0.0;
    for y in &pts {
        for j in 0..pc.components() {
            let c0 = compute_c0(pc, y, j, 12)?;
            for x in &pts {
                sampled = sampled.max(c0.eval(x, 0.0).abs());
            }
        }
    }
    let floor = (n * n) as f64 * pc.radius() * pc.bound_c();
    let c0_up = sampled.max(floor);
    let beta = beta_from_bound(n, pc.bound_c(), c0_up);
    Ok(BetaSelection {
        params: WarpParams::beta(beta)?,
        c0_up,
        c0_sampled: sampled,
        bound: beta_bound(n, pc.bound_c(), c0_up),
        lattice_points: pts.len() * pts.len(),
    })
}
