use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time parametrization used by an expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WarpMode {
    /// Expansion in physical time `t`.
    Plain,
    /// Expansion in `s = t / β`.
    Beta,
    /// Expansion in `τ` with `t = −β ln(1 − τ)`.
    Tau,
}

impl std::str::FromStr for WarpMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(WarpMode::Plain),
            "beta" => Ok(WarpMode::Beta),
            "tau" => Ok(WarpMode::Tau),
            other => Err(Error::Parameter(format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpParams {
    pub mode: WarpMode,
    pub beta: f64,
    /// Largest admissible `τ` (tau mode only).
    pub tau_max: f64,
}

impl WarpParams {
    pub fn plain() -> Self {
        WarpParams {
            mode: WarpMode::Plain,
            beta: 1.0,
            tau_max: 0.0,
        }
    }

    pub fn beta(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(WarpParams {
            mode: WarpMode::Beta,
            beta,
            tau_max: 0.0,
        })
    }

    pub fn tau(beta: f64, tau_max: f64) -> Result<Self> {
        check_beta(beta)?;
        if !(0.0..1.0).contains(&tau_max) {
            return Err(Error::Parameter(format!("tau_max must lie in [0, 1), got {tau_max}")));
        }
        Ok(WarpParams {
            mode: WarpMode::Tau,
            beta,
            tau_max,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            WarpMode::Plain => Ok(()),
            WarpMode::Beta => check_beta(self.beta),
            WarpMode::Tau => Self::tau(self.beta, self.tau_max).map(|_| ()),
        }
    }

    /// Expansion variable `s` corresponding to physical time `t`.
    pub fn to_internal(&self, t: f64) -> f64 {
        match self.mode {
            WarpMode::Plain => t,
            WarpMode::Beta => t / self.beta,
            WarpMode::Tau => tau_unchecked(t, self.beta),
        }
    }

    pub fn to_physical(&self, s: f64) -> f64 {
        match self.mode {
            WarpMode::Plain => s,
            WarpMode::Beta => s * self.beta,
            WarpMode::Tau => t_unchecked(s, self.beta),
        }
    }

    /// `ds/dt` at physical time `t`.
    pub fn internal_rate(&self, t: f64) -> f64 {
        match self.mode {
            WarpMode::Plain => 1.0,
            WarpMode::Beta => 1.0 / self.beta,
            WarpMode::Tau => (-t / self.beta).exp() / self.beta,
        }
    }

    /// Largest physical time the parametrization covers.
    pub fn horizon(&self) -> f64 {
        match self.mode {
            WarpMode::Tau => t_unchecked(self.tau_max, self.beta),
            _ => f64::INFINITY,
        }
    }

    /// Coefficients of `t = Σ_m θ_m s^m` up to `s^cap`.
    pub fn time_map(&self, cap: usize) -> Vec<f64> {
        match self.mode {
            WarpMode::Plain => vec![0.0, 1.0],
            WarpMode::Beta => vec![0.0, self.beta],
            WarpMode::Tau => (0..=cap.max(1))
                .map(|m| if m == 0 { 0.0 } else { self.beta / m as f64 })
                .collect(),
        }
    }

    /// Series multipliers `(q, r, u)` and scale `β̂` of the order recursion
    /// `k c_k + Δx·∇c_k = −q ∂_s c_{k−1} − (k−1) r c_{k−1} + β̂ u S_{k−1}`.
    pub(crate) fn recursion_series(&self, cap: usize) -> RecursionSeries {
        match self.mode {
            WarpMode::Plain => RecursionSeries {
                q: vec![1.0],
                r: vec![],
                u: vec![1.0],
                scale: 1.0,
            },
            WarpMode::Beta => RecursionSeries {
                q: vec![1.0],
                r: vec![],
                u: vec![1.0],
                scale: self.beta,
            },
            WarpMode::Tau => {
                // u(τ) = Σ τ^m/(m+1), q = (1−τ)u, r = (q − 1)/τ.
                let u: Vec<f64> = (0..=cap).map(|m| 1.0 / (m + 1) as f64).collect();
                let q: Vec<f64> = (0..=cap)
                    .map(|m| if m == 0 { 1.0 } else { -1.0 / (m * (m + 1)) as f64 })
                    .collect();
                let r: Vec<f64> = (0..cap).map(|m| -1.0 / ((m + 1) * (m + 2)) as f64).collect();
                RecursionSeries {
                    q,
                    r,
                    u,
                    scale: self.beta,
                }
            }
        }
    }
}

pub(crate) struct RecursionSeries {
    pub q: Vec<f64>,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub scale: f64,
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Parameter(format!(
            "beta must be positive and finite, got {beta}"
        )));
    }
    Ok(())
}

/// `τ = 1 − e^{−t/β}`.
pub fn tau_of_t(t: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if !(t >= 0.0) {
        return Err(Error::Parameter(format!("time must be nonnegative, got {t}")));
    }
    Ok(tau_unchecked(t, beta))
}

/// `t = −β ln(1 − τ)`.
pub fn t_of_tau(tau: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::Parameter(format!("tau must lie in [0, 1), got {tau}")));
    }
    Ok(t_unchecked(tau, beta))
}

fn tau_unchecked(t: f64, beta: f64) -> f64 {
    -(-t / beta).exp_m1()
}

fn t_unchecked(tau: f64, beta: f64) -> f64 {
    -beta * (-tau).ln_1p()
}

/// Outcome of [`warp_schedule`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WarpSchedule {
    pub params: WarpParams,
    /// Whether the requested horizon is reachable.
    pub achievable: bool,
    /// Largest physical time reachable under the constraint.
    pub max_horizon: f64,
    pub note: String,
}

/// Chooses `(β, τ_max)` maximizing the reachable time `−β ln(1 − τ_max)` subject to
/// `β / (1 − τ_max) ≤ c_target`.
///
/// The optimum is `1 − τ_max = e^{−1}`, `β = c_target/e`, so the horizon is capped at
/// `c_target/e` however the warp is tuned.
pub fn warp_schedule(horizon: f64, c_target: f64) -> Result<WarpSchedule> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Parameter("horizon must be positive".into()));
    }
    if !(c_target > 0.0 && c_target.is_finite()) {
        return Err(Error::Parameter("c_target must be positive".into()));
    }
    let e = std::f64::consts::E;
    let params = WarpParams::tau(c_target / e, 1.0 - 1.0 / e)?;
    let max_horizon = c_target / e;
    let achievable = horizon <= max_horizon * (1.0 + 1e-12);
    let note = if achievable {
        format!("horizon {horizon} reachable; warp constraint caps any horizon at c_target/e = {max_horizon:.6}")
    } else {
        format!(
            "horizon {horizon} exceeds c_target/e = {max_horizon:.6}; the warp cannot extend validity beyond a bounded horizon, schedule covers [0, {max_horizon:.6}] only"
        )
    };
    Ok(WarpSchedule {
        params,
        achievable,
        max_horizon,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_roundtrip() {
        for &t in &[1e-9, 0.1, 1.0, 2.0] {
            let tau = tau_of_t(t, 0.7).unwrap();
            assert!((t_of_tau(tau, 0.7).unwrap() - t).abs() <= 1e-14 * t);
        }
        assert_eq!(tau_of_t(0.0, 1.0).unwrap(), 0.0);
        assert!((t_of_tau(0.5, 1.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(t_of_tau(1.0, 1.0).is_err());
        assert!(tau_of_t(-0.1, 1.0).is_err());
    }

    #[test]
    fn schedule_example() {
        let s = warp_schedule(0.9, std::f64::consts::E).unwrap();
        assert!(s.achievable);
        assert!((s.params.beta - 1.0).abs() < 1e-15);
        assert!((s.params.tau_max - 0.632_120_558_828_557_7).abs() < 1e-15);
        assert!((s.max_horizon - 1.0).abs() < 1e-15);
        assert!((s.params.horizon() - 1.0).abs() < 1e-12);
        let far = warp_schedule(2.0, std::f64::consts::E).unwrap();
        assert!(!far.achievable);
    }

    #[test]
    fn time_map_matches_log_series() {
        let w = WarpParams::tau(0.8, 0.5).unwrap();
        let map = w.time_map(40);
        let tau: f64 = 0.3;
        let series: f64 = map.iter().enumerate().map(|(m, c)| c * tau.powi(m as i32)).sum();
        assert!((series - t_of_tau(tau, 0.8).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn recursion_series_identities() {
        let w = WarpParams::tau(1.0, 0.5).unwrap();
        let rs = w.recursion_series(30);
        let tau: f64 = 0.2;
        let ev = |c: &[f64]| c.iter().enumerate().map(|(m, a)| a * tau.powi(m as i32)).sum::<f64>();
        let u = ev(&rs.u);
        assert!((u - (-(-tau).ln_1p()) / tau).abs() < 1e-14);
        assert!((ev(&rs.q) - (1.0 - tau) * u).abs() < 1e-14);
        assert!((ev(&rs.r) - ((1.0 - tau) * u - 1.0) / tau).abs() < 1e-14);
    }

    #[test]
    fn invalid_params() {
        assert!(WarpParams::beta(0.0).is_err());
        assert!(WarpParams::tau(1.0, 1.0).is_err());
        assert!("warp".parse::<WarpMode>().is_err());
    }
}
