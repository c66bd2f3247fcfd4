use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::KernelFamily;
use crate::polyalg::{CoefficientFn, SpatialFn};
use crate::quadrature::HermiteRule;
use crate::recursion::{ExpansionConfig, ProblemCoefficients};

use super::cauchy::{meta, QuadConfig};
use super::spec::{GridSolution, ProblemKind, ProblemSpec};

/// Largest `|Φ₀|/(2ν)` below which `exp` stays representable.
const EXP_LIMIT: f64 = 700.0;

/// Heat-side coefficients for a Burgers problem: `∂_s ψ = Δψ + V ψ` in `s = νt` with
/// `V(s, x) = F(s/ν, x)/(2ν²)`.
///
/// `F` must be polynomial in time (zero rate) with polynomial, sine or constant space parts.
pub fn burgers_heat_coefficients(ps: &ProblemSpec) -> Result<ProblemCoefficients> {
    ps.validate()?;
    if ps.kind != ProblemKind::Burgers {
        return Err(Error::Parameter("expected a burgers problem".into()));
    }
    let nu = ps.nu.expect("validated");
    let n = ps.domain.dim();
    let pc = ProblemCoefficients::new(n, 1, ps.domain.clone())?;
    if ps.source.is_zero() {
        return Ok(pc);
    }
    let mut by_power: Vec<SpatialFn> = Vec::new();
    for term in &ps.source.terms {
        if term.rate != 0.0 {
            return Err(Error::Unsupported("forcing with exponential time factor".into()));
        }
        let p = term.power as usize;
        if by_power.len() <= p {
            by_power.resize(p + 1, SpatialFn::zero(n));
        }
        let scale = term.coeff / (2.0 * nu * nu) / nu.powi(term.power as i32);
        by_power[p] = by_power[p].plus(&term.space.to_spatial(n)?.scaled(scale))?;
    }
    pc.with_potential(0, CoefficientFn::time_polynomial(by_power)?)
}

struct Heat<'a> {
    ps: &'a ProblemSpec,
    family: KernelFamily,
    rule: HermiteRule,
    nu: f64,
}

impl Heat<'_> {
    fn psi0(&self, y: &[f64]) -> f64 {
        (self.ps.phi.eval(y) / (2.0 * self.nu)).exp()
    }

    /// `v = −2ν ∇ψ/ψ` at physical time `t`.
    fn velocity(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        let (psi, grad) = self
            .family
            .convolve(self.nu * t, 0.0, x, 0, &self.rule, |y| self.psi0(y), true)?;
        if !(psi > f64::MIN_POSITIVE) {
            return Err(scaling(self.ps, x));
        }
        Ok(grad.iter().map(|g| -2.0 * self.nu * g / psi).collect())
    }
}

fn scaling(ps: &ProblemSpec, x: &[f64]) -> Error {
    let pts = ps.output.grid.points();
    let top = pts.iter().map(|p| ps.phi.eval(p)).fold(f64::NEG_INFINITY, f64::max);
    Error::Scaling(format!(
        "exp(Phi0/(2 nu)) underflows near x = {x:?}; Phi0 is defined up to a constant, subtract {top:.6} (its grid maximum) and retry"
    ))
}

fn heat<'a>(ps: &'a ProblemSpec, cfg: &ExpansionConfig, quad: &QuadConfig) -> Result<Heat<'a>> {
    let pc = burgers_heat_coefficients(ps)?;
    let nu = ps.nu.expect("validated");
    for p in ps.output.grid.points() {
        if ps.phi.eval(&p) / (2.0 * nu) < -EXP_LIMIT {
            return Err(scaling(ps, &p));
        }
    }
    Ok(Heat {
        ps,
        family: KernelFamily::new(pc, cfg.clone())?,
        rule: HermiteRule::new(ps.domain.dim(), quad.gh_order, quad.prune)?,
        nu,
    })
}

/// Potential Burgers flow `v_t + (v·∇)v = νΔv − ∇F`, `v = −∇Φ`, `v(0) = −∇Φ₀`, through
/// `Φ = 2ν ln ψ` and the expansion kernel of the heat side.
///
/// `ps.phi` holds `Φ₀` and `ps.source` holds `F`. The result has one component per axis.
pub fn burgers_demo(ps: &ProblemSpec, cfg: &ExpansionConfig, quad: &QuadConfig) -> Result<GridSolution> {
    let h = heat(ps, cfg, quad)?;
    let n = ps.domain.dim();
    let pts = ps.output.grid.points();
    let mut values = Vec::with_capacity(ps.output.times.len() * pts.len() * n);
    for &t in &ps.output.times {
        let block: Vec<Vec<f64>> = pts.par_iter().map(|x| h.velocity(t, x)).collect::<Result<_>>()?;
        values.extend(block.into_iter().flatten());
    }
    GridSolution::new(
        ps.output.times.clone(),
        ps.output.grid.clone(),
        n,
        values,
        meta("expansion-burgers", &h.family, quad, None),
    )
}

/// Largest `|∂₁v₂ − ∂₂v₁|` over `points`, divided by the largest Jacobian entry of `v`
/// there. Derivatives are fourth-order central differences with step `h`.
pub fn burgers_curl(
    ps: &ProblemSpec,
    cfg: &ExpansionConfig,
    quad: &QuadConfig,
    t: f64,
    points: &[Vec<f64>],
    h: f64,
) -> Result<f64> {
    if ps.domain.dim() != 2 {
        return Err(Error::Unsupported("curl check needs n = 2".into()));
    }
    if !(h > 0.0) {
        return Err(Error::Parameter("difference step must be positive".into()));
    }
    let hs = heat(ps, cfg, quad)?;
    let per_point: Vec<(f64, f64)> = points
        .par_iter()
        .map(|x| {
            // jac[axis][comp] = ∂v_comp/∂x_axis.
            let mut jac = [[0.0; 2]; 2];
            for (axis, row) in jac.iter_mut().enumerate() {
                for (off, w) in [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)] {
                    let mut y = x.clone();
                    y[axis] += off * h;
                    let v = hs.velocity(t, &y)?;
                    row[0] += w * v[0] / (12.0 * h);
                    row[1] += w * v[1] / (12.0 * h);
                }
            }
            let size = jac.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            Ok(((jac[0][1] - jac[1][0]).abs(), size))
        })
        .collect::<Result<_>>()?;
    let curl = per_point.iter().fold(0.0f64, |m, p| m.max(p.0));
    let size = per_point.iter().fold(0.0f64, |m, p| m.max(p.1));
    Ok(if size == 0.0 { curl } else { curl / size })
}
