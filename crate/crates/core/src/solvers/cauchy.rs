use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelFamily;
use crate::quadrature::{HermiteRule, LegendreRule};

use super::spec::{GridSolution, ProblemKind, ProblemSpec, SolveMeta};

/// Quadrature settings shared by the solvers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Gauss–Hermite nodes per axis.
    pub gh_order: usize,
    /// Gauss–Legendre nodes per time panel.
    pub gl_order: usize,
    pub gl_panels: usize,
    /// Relative weight below which Hermite nodes are dropped.
    pub prune: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            gh_order: 40,
            gl_order: 32,
            gl_panels: 1,
            prune: 1e-18,
        }
    }
}

/// `u_i(t, x) = ∫ p_i(t, x; 0, y) φ(y) dy + ∫_0^t ∫ p_i(t, x; s, y) f(s, y) dy ds`
/// on the output grid.
///
/// All components share the scalar initial datum `φ`.
pub fn solve_cauchy(ps: &ProblemSpec, family: &KernelFamily, quad: &QuadConfig) -> Result<GridSolution> {
    ps.validate()?;
    if ps.kind != ProblemKind::Cauchy {
        return Err(Error::Parameter("solve_cauchy expects a cauchy problem".into()));
    }
    check_family(ps, family)?;
    let n = ps.coefficients.dim();
    let m = ps.coefficients.components();
    let rule = HermiteRule::new(n, quad.gh_order, quad.prune)?;
    let gl = LegendreRule::new(quad.gl_order)?;
    let pts = ps.output.grid.points();
    let mut values = Vec::with_capacity(ps.output.times.len() * pts.len() * m);
    for &t in &ps.output.times {
        let block: Vec<Vec<f64>> = pts
            .par_iter()
            .map(|x| {
                (0..m)
                    .map(|j| cauchy_point(ps, family, &rule, &gl, quad.gl_panels, t, x, j))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        values.extend(block.into_iter().flatten());
    }
    GridSolution::new(
        ps.output.times.clone(),
        ps.output.grid.clone(),
        m,
        values,
        meta("expansion-cauchy", family, quad, None),
    )
}

pub(crate) fn check_family(ps: &ProblemSpec, family: &KernelFamily) -> Result<()> {
    if family.coefficients() != &ps.coefficients {
        return Err(Error::Structural(
            "kernel family was built for different coefficients".into(),
        ));
    }
    Ok(())
}

pub(crate) fn meta(method: &str, family: &KernelFamily, quad: &QuadConfig, steps: Option<usize>) -> SolveMeta {
    SolveMeta {
        method: method.into(),
        order: Some(family.config().order),
        degree: Some(family.config().degree),
        gh_order: Some(quad.gh_order),
        gl_order: Some(quad.gl_order),
        steps,
    }
}

#[allow(clippy::too_many_arguments)]
fn cauchy_point(
    ps: &ProblemSpec,
    family: &KernelFamily,
    rule: &HermiteRule,
    gl: &LegendreRule,
    panels: usize,
    t: f64,
    x: &[f64],
    j: usize,
) -> Result<f64> {
    let mut u = if ps.phi.is_zero() {
        0.0
    } else {
        family.convolve(t, 0.0, x, j, rule, |y| ps.phi.eval(y), false)?.0
    };
    if !ps.source.is_zero() {
        // Substitute s = t − σ² so the shrinking kernel width is resolved near s = t.
        let root = t.sqrt();
        let h = root / panels.max(1) as f64;
        for p in 0..panels.max(1) {
            for (sigma, w) in gl.on(p as f64 * h, (p + 1) as f64 * h) {
                let s = t - sigma * sigma;
                let (v, _) = family.convolve(t, s, x, j, rule, |y| ps.source.eval(s, y), false)?;
                u += w * 2.0 * sigma * v;
            }
        }
    }
    Ok(u)
}
