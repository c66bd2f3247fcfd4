use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kernel::{eval_kernel, normalization_check, residual, KernelFamily};
use crate::oracle::{exact_const_drift_kernel, exact_potential_kernel, fd_solve, quad_ray, FdBoundary, FdConfig};
use crate::polyalg::{CoefficientFn, MultiIndex};
use crate::recursion::{
    expand, pk_gamma, ray_exponent, ray_weight, warp_schedule, ExpansionConfig, ProblemCoefficients, WarpMode,
    WarpParams,
};
use crate::solvers::{burgers_demo, solve_cauchy, solve_ibvp2, BoundaryConfig, ProblemKind};

use super::file::{Overrides, ProblemFile};

/// One named oracle comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Deliberate defects for exercising the report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Drops the `(1 − τ)` factor from the tau-mode ray weight.
    RayWeight,
}

#[derive(Clone, Debug)]
pub struct ValidateOptions {
    /// Tolerance of the closed-form kernel checks.
    pub tol: f64,
    pub fault: Option<Fault>,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            tol: 1e-12,
            fault: None,
        }
    }
}

fn check(name: &str, dev: f64, tol: f64, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        passed: dev <= tol,
        max_deviation: dev,
        tolerance: tol,
        detail: detail.into(),
    }
}

/// Runs every oracle check that applies to the file.
pub fn validate(file: &ProblemFile, ov: &Overrides, opts: &ValidateOptions) -> Result<ValidationReport> {
    let pc = file.coefficients()?;
    let (cfg, _) = file.expansion_config(&pc, ov)?;
    let mut checks = vec![
        ray_weights(&cfg.warp, opts.fault)?,
        pk_gamma_forms()?,
        c0_independence(&pc, &cfg)?,
    ];
    let plain = ExpansionConfig::new(cfg.order.max(4), cfg.degree, WarpParams::plain());
    if let Some((b0, b1)) = linear_time_drift(&pc) {
        checks.push(closed_form(
            &pc,
            &plain,
            file.horizon,
            opts.tol,
            "const_drift_exact",
            |t, x, y| exact_const_drift_kernel(b0, b1, t, x, y),
        )?);
    }
    if let Some(v) = constant_potential(&pc) {
        checks.push(closed_form(
            &pc,
            &plain,
            file.horizon,
            opts.tol,
            "potential_exact",
            |t, x, y| exact_potential_kernel(v, t, x, y),
        )?);
    }
    if pc.components() == 1 && pc.potential().is_empty() {
        let fam = KernelFamily::new(pc.clone(), cfg.clone())?;
        let t = file.horizon.min(0.05).min(0.5 * cfg.warp.horizon());
        let x = center(file);
        let dev = (normalization_check(&fam, t, &x, 0, 40)? - 1.0).abs();
        checks.push(check(
            "normalization",
            dev,
            1e-4,
            format!("integral of p over y at t = {t}"),
        ));
    }
    if cfg.warp.mode != WarpMode::Plain {
        checks.push(warp_consistency(file, &pc, &cfg)?);
    }
    checks.push(residual_report(file, &pc, &cfg)?);
    if let Some(c) = ov.c_target.or(file.expansion.c_target) {
        let s = warp_schedule(file.horizon, c)?;
        let e = std::f64::consts::E;
        let flag_ok = s.achievable == (file.horizon <= c / e);
        let dev = if flag_ok {
            (s.max_horizon - c / e).abs()
        } else {
            f64::INFINITY
        };
        checks.push(check("warp_schedule", dev, 1e-12, s.note));
    }
    if file.dimension == 1 {
        checks.push(fd_crosscheck(file, &pc, &cfg, ov)?);
    }
    Ok(ValidationReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn center(file: &ProblemFile) -> Vec<f64> {
    file.domain
        .lower
        .iter()
        .zip(&file.domain.upper)
        .map(|(a, b)| 0.5 * (a + b))
        .collect()
}

/// Closed-form ray weights against direct quadrature of `∫ s^{|γ|+a−1} ds`.
fn ray_weights(file_warp: &WarpParams, fault: Option<Fault>) -> Result<Check> {
    let mut cases = vec![
        (WarpMode::Plain, 1.0, 0.0),
        (WarpMode::Beta, 0.1, 0.0),
        (WarpMode::Tau, 0.1, 0.5),
    ];
    if file_warp.mode != WarpMode::Plain {
        let tau = if file_warp.mode == WarpMode::Tau {
            0.5 * file_warp.tau_max
        } else {
            0.0
        };
        cases.push((file_warp.mode, file_warp.beta, tau));
    }
    let mut worst: f64 = 0.0;
    for &(mode, beta, tau) in &cases {
        for order in 0..=8u32 {
            for k in 1..=8usize {
                let a = ray_exponent(mode, k, beta, tau);
                let numeric = quad_ray(|s| s.powi(order as i32), a, 1e-15)?;
                let closed = match (fault, mode) {
                    (Some(Fault::RayWeight), WarpMode::Tau) => beta / (beta * f64::from(order) + k as f64),
                    _ => ray_weight(mode, order, k, beta, tau),
                };
                worst = worst.max((closed - numeric).abs());
            }
        }
    }
    Ok(check(
        "ray_weight_E4",
        worst,
        1e-12,
        "|gamma| <= 8, k <= 8, plain / beta / tau weights",
    ))
}

/// `pk_gamma` against its diagonal form at `y = 0` and quadrature at `y = 0.7`.
fn pk_gamma_forms() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for g in 0..=8u32 {
        let gamma = MultiIndex::new(vec![g])?;
        for &a in &[1.0, 2.5, 8.0] {
            for &dx in &[-0.6f64, 0.3, 0.9] {
                let diag = dx.powi(g as i32) / (f64::from(g) + a);
                worst = worst.max((pk_gamma(&gamma, a, &[0.0], &[dx])? - diag).abs());
                let numeric = quad_ray(|s| (0.7 + s * dx).powi(g as i32), a, 1e-15)?;
                worst = worst.max((pk_gamma(&gamma, a, &[0.7], &[dx])? - numeric).abs());
            }
        }
    }
    Ok(check("pk_gamma_diagonal", worst, 1e-12, "y in {0, 0.7}, |gamma| <= 8"))
}

/// The time-zero part of `c_0` does not depend on the time parametrization.
fn c0_independence(pc: &ProblemCoefficients, cfg: &ExpansionConfig) -> Result<Check> {
    let y: Vec<f64> = pc
        .domain()
        .lower
        .iter()
        .zip(&pc.domain().upper)
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    let warps = [
        WarpParams::plain(),
        WarpParams::beta(0.3)?,
        WarpParams::tau(0.3, 0.5)?,
        cfg.warp,
    ];
    let reference = expand(pc, &y, &ExpansionConfig::new(0, cfg.degree, warps[0]))?;
    let mut worst: f64 = 0.0;
    for w in &warps[1..] {
        let e = expand(pc, &y, &ExpansionConfig::new(0, cfg.degree, *w))?;
        for j in 0..pc.components() {
            let a = &reference.coeff(j, 0).terms()[0];
            let b = &e.coeff(j, 0).terms()[0];
            for (u, v) in a.coeffs().iter().zip(b.coeffs()) {
                worst = worst.max((u - v).abs());
            }
        }
    }
    Ok(check(
        "c0_mode_independence",
        worst,
        0.0,
        "time-zero part of c_0 in every mode",
    ))
}

/// `(b0, b1)` when the problem is `u_t = u_xx + (b0 + b1 t) u_x` in one dimension.
fn linear_time_drift(pc: &ProblemCoefficients) -> Option<(f64, f64)> {
    if pc.dim() != 1 || pc.components() != 1 || !pc.potential().is_empty() {
        return None;
    }
    match pc.drift_entry(0, 0, 0) {
        None => Some((0.0, 0.0)),
        Some(f) => {
            let c = constant_in_space(f)?;
            match c.as_slice() {
                [b0] => Some((*b0, 0.0)),
                [b0, b1] => Some((*b0, *b1)),
                _ => None,
            }
        }
    }
}

fn constant_potential(pc: &ProblemCoefficients) -> Option<f64> {
    if pc.dim() != 1 || pc.components() != 1 || !pc.is_drift_free() {
        return None;
    }
    match constant_in_space(pc.potential().get(&0)?)?.as_slice() {
        [v] => Some(*v),
        _ => None,
    }
}

/// Time coefficients of a coefficient that is constant in space.
fn constant_in_space(f: &CoefficientFn) -> Option<Vec<f64>> {
    f.time_terms()
        .iter()
        .map(|s| {
            if !s.fourier_terms().is_empty() || s.poly_terms().iter().any(|p| p.exponents.iter().any(|&e| e != 0)) {
                None
            } else {
                Some(s.poly_terms().iter().map(|p| p.coeff).sum())
            }
        })
        .collect()
}

fn closed_form(
    pc: &ProblemCoefficients,
    cfg: &ExpansionConfig,
    horizon: f64,
    tol: f64,
    name: &str,
    exact: impl Fn(f64, f64, f64) -> Result<f64>,
) -> Result<Check> {
    let lattice = pc.domain().lattice(11);
    let times: Vec<f64> = [0.1, 0.5, 1.0].iter().map(|f| f * horizon).collect();
    let mut worst: f64 = 0.0;
    for y in &lattice {
        let e = expand(pc, y, cfg)?;
        for x in &lattice {
            for &t in &times {
                let p = eval_kernel(&e, t, x, y, 0)?;
                let q = exact(t, x[0], y[0])?;
                worst = worst.max((p.value / q - 1.0).abs());
            }
        }
    }
    Ok(check(
        name,
        worst,
        tol,
        format!("relative error, 11 x 11 lattice, t = {times:?}"),
    ))
}

fn warp_consistency(file: &ProblemFile, pc: &ProblemCoefficients, cfg: &ExpansionConfig) -> Result<Check> {
    let y = center(file);
    let t = (0.1f64).min(file.horizon).min(0.5 * cfg.warp.horizon());
    let plain = ExpansionConfig::new(cfg.order.max(8), cfg.degree, WarpParams::plain());
    let warped = ExpansionConfig {
        order: cfg.order.max(8),
        ..cfg.clone()
    };
    let (a, b) = (expand(pc, &y, &plain)?, expand(pc, &y, &warped)?);
    let mut worst: f64 = 0.0;
    for x in pc.domain().lattice(9) {
        for j in 0..pc.components() {
            let p = eval_kernel(&a, t, &x, &y, j)?.value;
            let q = eval_kernel(&b, t, &x, &y, j)?.value;
            worst = worst.max((q / p - 1.0).abs());
        }
    }
    Ok(check(
        "warp_consistency",
        worst,
        1e-6,
        format!("{:?} against plain mode at t = {t}, K >= 8", cfg.warp.mode),
    ))
}

fn residual_report(file: &ProblemFile, pc: &ProblemCoefficients, cfg: &ExpansionConfig) -> Result<Check> {
    let y = center(file);
    let e = expand(pc, &y, cfg)?;
    let t = (0.05f64).min(file.horizon).min(0.5 * cfg.warp.horizon());
    let mut worst: f64 = 0.0;
    for x in pc.domain().lattice(9) {
        for r in residual(&e, pc, t, &x, &y)?.relative {
            worst = worst.max(if r.is_finite() { r.abs() } else { f64::INFINITY });
        }
    }
    let mut c = check(
        "residual_finite",
        if worst.is_finite() { 0.0 } else { f64::INFINITY },
        0.0,
        "",
    );
    c.detail = format!("max relative residual {worst:e} at t = {t}, K = {}", cfg.order);
    Ok(c)
}

fn fd_crosscheck(file: &ProblemFile, pc: &ProblemCoefficients, cfg: &ExpansionConfig, ov: &Overrides) -> Result<Check> {
    let ps = file.spec()?;
    let quad = file.quad_config(ov);
    let lo = file.domain.lower[0];
    let hi = file.domain.upper[0];
    let solver_cfg = ExpansionConfig {
        sample_diagnostics: false,
        ..cfg.clone()
    };
    let (sol, fd, tol) = match ps.kind {
        ProblemKind::Cauchy => {
            if pc.components() != 1 {
                return Ok(check("fd_crosscheck", 0.0, 5e-3, "skipped for systems"));
            }
            let fam = KernelFamily::new(pc.clone(), solver_cfg)?;
            let fd_cfg =
                FdConfig::crank_nicolson(1.0 / 128.0, 1e-3, FdBoundary::LargeBoxDirichlet).with_box(lo - 6.0, hi + 6.0);
            (solve_cauchy(&ps, &fam, &quad)?, fd_solve(&ps, &fd_cfg)?, 5e-3)
        }
        ProblemKind::Ibvp2 => {
            let fam = KernelFamily::new(pc.clone(), solver_cfg)?;
            let fd_cfg = FdConfig::crank_nicolson((hi - lo) / 128.0, 1e-3, FdBoundary::ExactRobin);
            let (sol, _) = solve_ibvp2(&ps, &fam, &BoundaryConfig::new(file.steps(ov)), &quad)?;
            (sol, fd_solve(&ps, &fd_cfg)?, 1e-2)
        }
        ProblemKind::Burgers => {
            let nu = ps.nu.unwrap_or(1.0);
            let h = 1.0 / 64.0;
            let dt = (0.4 * h * h / nu).min(1e-3);
            let fd_cfg = FdConfig::explicit(h, dt, FdBoundary::LargeBoxDirichlet).with_box(lo - 6.0, hi + 6.0);
            (burgers_demo(&ps, &solver_cfg, &quad)?, fd_solve(&ps, &fd_cfg)?, 1e-2)
        }
    };
    let dev = sol.max_abs_diff(&fd, |_| true)?;
    Ok(check(
        "fd_crosscheck",
        dev,
        tol,
        format!("{:?} against finite differences, L-infinity", ps.kind),
    ))
}
