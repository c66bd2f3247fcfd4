use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::KernelFamily;
use crate::quadrature::LegendreRule;

use super::cauchy::{check_family, meta, QuadConfig};
use super::spec::{BoundaryDensity, GridSolution, ProblemKind, ProblemSpec};

/// Settings specific to the boundary march.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryConfig {
    /// Uniform time steps on `[0, T]`.
    pub steps: usize,
    /// Gauss–Legendre nodes per step for the density weights.
    pub weight_order: usize,
    /// Panels of the windowed volume integrals over `Ω`.
    pub volume_panels: usize,
    /// Gauss–Legendre nodes per volume panel.
    pub volume_order: usize,
}

impl BoundaryConfig {
    pub fn new(steps: usize) -> Self {
        BoundaryConfig {
            steps,
            weight_order: 16,
            volume_panels: 8,
            volume_order: 16,
        }
    }
}

struct Setup<'a> {
    ps: &'a ProblemSpec,
    family: &'a KernelFamily,
    points: [f64; 2],
    normals: [f64; 2],
    dt: f64,
    gl: LegendreRule,
    vol: LegendreRule,
    time_gl: LegendreRule,
    volume_panels: usize,
}

/// `∫_{s0}^{s1} F(s) s^{−1/2} ds` for `F` with an optional `(t − s)^{−1/2}` singularity at
/// `s1 = t`; substitutions remove both endpoint singularities.
fn singular_integral(rule: &LegendreRule, s0: f64, s1: f64, t: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let at_zero = s0 == 0.0;
    let at_t = (s1 - t).abs() <= 1e-14 * t.max(1.0);
    let mut total = 0.0;
    if at_zero && at_t {
        // s = t sin²θ.
        for (th, w) in rule.on(0.0, std::f64::consts::FRAC_PI_2) {
            let (sn, cs) = th.sin_cos();
            let s = t * sn * sn;
            total += w * f(s)? * 2.0 * t.sqrt() * cs;
        }
    } else if at_zero {
        // s = s1 w².
        for (v, w) in rule.on(0.0, 1.0) {
            let s = s1 * v * v;
            total += w * f(s)? * 2.0 * s1.sqrt();
        }
    } else if at_t {
        // s = t − (t − s0) w².
        let span = t - s0;
        for (v, w) in rule.on(0.0, 1.0) {
            let s = t - span * v * v;
            total += w * f(s)? * s.powf(-0.5) * 2.0 * span * v;
        }
    } else {
        for (s, w) in rule.on(s0, s1) {
            total += w * f(s)? * s.powf(-0.5);
        }
    }
    Ok(total)
}

impl Setup<'_> {
    /// Value and x-derivative of `p(t, x; s, y)`.
    fn kernel(&self, t: f64, x: f64, s: f64, y: f64) -> Result<(f64, f64)> {
        let k = self.family.kernel(t, &[x], s, &[y], 0)?;
        Ok((k.value, k.gradient[0]))
    }

    /// `∂_ν p + α p` at boundary point `q`.
    fn boundary_kernel(&self, q: usize, t: f64, s: f64, p: usize) -> Result<f64> {
        let x = self.points[q];
        let (v, d) = self.kernel(t, x, s, self.points[p])?;
        Ok(self.normals[q] * d + self.ps.alpha.eval(t, &[x]) * v)
    }

    /// Windowed Gauss–Legendre integral of `p(t, x; s, ·) g` (and its x-derivative) over Ω.
    fn volume(&self, t: f64, s: f64, x: f64, g: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
        let half = 10.0 * (t - s).sqrt();
        let lo = (x - half).max(self.points[0]);
        let hi = (x + half).min(self.points[1]);
        if lo >= hi {
            return Ok((0.0, 0.0));
        }
        let h = (hi - lo) / self.volume_panels as f64;
        let (mut v, mut d) = (0.0, 0.0);
        for p in 0..self.volume_panels {
            for (y, w) in self.vol.on(lo + p as f64 * h, lo + (p + 1) as f64 * h) {
                let gy = g(y);
                if gy == 0.0 {
                    continue;
                }
                let (kv, kd) = self.kernel(t, x, s, y)?;
                v += w * kv * gy;
                d += w * kd * gy;
            }
        }
        Ok((v, d))
    }

    /// Free-space part `U0` restricted to Ω and its x-derivative.
    fn u0(&self, t: f64, x: f64) -> Result<(f64, f64)> {
        let (mut v, mut d) = if self.ps.phi.is_zero() {
            (0.0, 0.0)
        } else {
            self.volume(t, 0.0, x, |y| self.ps.phi.eval(&[y]))?
        };
        if !self.ps.source.is_zero() {
            let root = t.sqrt();
            for (sigma, w) in self.time_gl.on(0.0, root) {
                let s = t - sigma * sigma;
                let (a, b) = self.volume(t, s, x, |y| self.ps.source.eval(s, &[y]))?;
                v += w * 2.0 * sigma * a;
                d += w * 2.0 * sigma * b;
            }
        }
        Ok((v, d))
    }
}

/// Second-type boundary problem on `Ω = (a, b)`: `∂_t u = u_xx + b u_x + V u + f`,
/// `∂u/∂ν + αu = ψ` with outward normal, `u(0) = φ`.
///
/// The solution is `U0 + Σ_p ∫_0^t p(t, x; s, p) γ_p(s) ds`, with `U0` the free-space
/// propagation of `φ, f` restricted to Ω. The density solves the Volterra equation
/// `½γ + ∫(∂_ν p + αp)γ = ψ − ∂_ν U0 − αU0` at the boundary. It is modelled as
/// `γ = s^{−1/2} g` with `g` piecewise constant on the steps, collocated at step midpoints.
pub fn solve_ibvp2(
    ps: &ProblemSpec,
    family: &KernelFamily,
    bc: &BoundaryConfig,
    quad: &QuadConfig,
) -> Result<(GridSolution, BoundaryDensity)> {
    ps.validate()?;
    if ps.kind != ProblemKind::Ibvp2 {
        return Err(Error::Parameter("solve_ibvp2 expects an ibvp2 problem".into()));
    }
    check_family(ps, family)?;
    if ps.coefficients.components() != 1 {
        return Err(Error::Unsupported("boundary problems are scalar".into()));
    }
    if bc.steps == 0 {
        return Err(Error::Parameter("steps must be >= 1".into()));
    }
    let setup = Setup {
        ps,
        family,
        points: [ps.domain.lower[0], ps.domain.upper[0]],
        normals: [-1.0, 1.0],
        dt: ps.horizon / bc.steps as f64,
        gl: LegendreRule::new(bc.weight_order)?,
        vol: LegendreRule::new(bc.volume_order)?,
        time_gl: LegendreRule::new(quad.gl_order)?,
        volume_panels: bc.volume_panels.max(1),
    };
    let g = march(&setup, bc.steps)?;
    let dt = setup.dt;
    let colloc: Vec<f64> = (1..=bc.steps).map(|n| (n as f64 - 0.5) * dt).collect();
    let density = BoundaryDensity {
        times: colloc.clone(),
        points: setup.points.to_vec(),
        values: (0..2)
            .map(|q| colloc.iter().zip(&g[q]).map(|(c, v)| v / c.sqrt()).collect())
            .collect(),
    };

    let pts = ps.output.grid.points();
    let mut values = Vec::new();
    for &t in &ps.output.times {
        let block: Vec<f64> = pts
            .par_iter()
            .map(|x| reconstruct(&setup, &g, t, x[0]))
            .collect::<Result<_>>()?;
        values.extend(block);
    }
    let sol = GridSolution::new(
        ps.output.times.clone(),
        ps.output.grid.clone(),
        1,
        values,
        meta("expansion-ibvp2", family, quad, Some(bc.steps)),
    )?;
    Ok((sol, density))
}

fn march(setup: &Setup<'_>, steps: usize) -> Result<[Vec<f64>; 2]> {
    let dt = setup.dt;
    let mut g: [Vec<f64>; 2] = [Vec::with_capacity(steps), Vec::with_capacity(steps)];
    for n in 1..=steps {
        let c = (n as f64 - 0.5) * dt;
        // Weights W[q][p][m] = ∫_{interval m ∩ [0, c]} K_qp(c, s) s^{−1/2} ds.
        let weights: Vec<[[f64; 2]; 2]> = (1..=n)
            .into_par_iter()
            .map(|m| {
                let s0 = (m - 1) as f64 * dt;
                let s1 = (m as f64 * dt).min(c);
                let mut w = [[0.0; 2]; 2];
                for (q, row) in w.iter_mut().enumerate() {
                    for (p, cell) in row.iter_mut().enumerate() {
                        *cell = singular_integral(&setup.gl, s0, s1, c, |s| setup.boundary_kernel(q, c, s, p))?;
                    }
                }
                Ok(w)
            })
            .collect::<Result<_>>()?;
        let mut rhs = [0.0; 2];
        for (q, r) in rhs.iter_mut().enumerate() {
            let x = setup.points[q];
            let (u0, du0) = setup.u0(c, x)?;
            *r = setup.ps.psi.eval(c, &[x]) - setup.normals[q] * du0 - setup.ps.alpha.eval(c, &[x]) * u0;
            for (m, w) in weights[..n - 1].iter().enumerate() {
                *r -= w[q][0] * g[0][m] + w[q][1] * g[1][m];
            }
        }
        let jump = 0.5 / c.sqrt();
        let diag = &weights[n - 1];
        let a = [[jump + diag[0][0], diag[0][1]], [diag[1][0], jump + diag[1][1]]];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        if det.abs() < 1e-10 * scale * scale {
            return Err(Error::Conditioning(format!(
                "step {n}: boundary system is singular (det = {det:e})"
            )));
        }
        g[0].push((rhs[0] * a[1][1] - a[0][1] * rhs[1]) / det);
        g[1].push((a[0][0] * rhs[1] - a[1][0] * rhs[0]) / det);
    }
    Ok(g)
}

fn reconstruct(setup: &Setup<'_>, g: &[Vec<f64>; 2], t: f64, x: f64) -> Result<f64> {
    let (mut u, _) = setup.u0(t, x)?;
    let dt = setup.dt;
    let last = ((t / dt - 1e-9).ceil() as usize).clamp(1, g[0].len());
    for m in 1..=last {
        let s0 = (m - 1) as f64 * dt;
        let s1 = if m == last { t } else { m as f64 * dt };
        if s1 <= s0 {
            continue;
        }
        for (&y, gp) in setup.points.iter().zip(g) {
            let integral = singular_integral(&setup.gl, s0, s1, t, |s| {
                if s >= t {
                    return Ok(0.0);
                }
                Ok(setup.kernel(t, x, s, y)?.0)
            })?;
            u += gp[m - 1] * integral;
        }
    }
    Ok(u)
}
