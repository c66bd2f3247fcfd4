use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyalg::{CoefficientFn, FourierTerm, PolyTerm, SpatialFn};
use crate::recursion::{
    select_beta, tau_of_t, warp_schedule, BoxDomain, ExpansionConfig, ProblemCoefficients, WarpMode, WarpParams,
};
use crate::solvers::{FunctionSpec, Grid, OutputSpec, ProblemKind, ProblemSpec, QuadConfig, SpaceTimeFn};

/// Spatial coefficient data, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientSpec {
    Poly {
        terms: Vec<PolyTerm>,
    },
    Fourier {
        terms: Vec<FourierTerm>,
    },
    /// `terms[l]` multiplies `t^l`.
    TimePoly {
        terms: Vec<SpatialTerms>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpatialTerms {
    #[serde(default)]
    pub poly: Vec<PolyTerm>,
    #[serde(default)]
    pub fourier: Vec<FourierTerm>,
}

/// `b^i_{jk}`: equation `i`, component `j`, axis `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    #[serde(flatten)]
    pub coefficient: CoefficientSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialEntry {
    pub i: usize,
    #[serde(flatten)]
    pub coefficient: CoefficientSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub kind: ProblemKind,
    /// Initial datum; `Φ₀` for burgers.
    #[serde(default = "zero_fn")]
    pub phi: FunctionSpec,
    /// Source; the forcing potential `F` for burgers.
    #[serde(default)]
    pub f: SpaceTimeFn,
    #[serde(default)]
    pub alpha: SpaceTimeFn,
    #[serde(default)]
    pub psi: SpaceTimeFn,
    #[serde(default)]
    pub nu: Option<f64>,
}

fn zero_fn() -> FunctionSpec {
    FunctionSpec::Zero
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionSection {
    #[serde(rename = "order_K", default = "default_order")]
    pub order: usize,
    #[serde(rename = "degree_D", default = "default_degree")]
    pub degree: u32,
    #[serde(default = "default_mode")]
    pub mode: WarpMode,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub c_target: Option<f64>,
    #[serde(default)]
    pub tau_max: Option<f64>,
}

fn default_order() -> usize {
    4
}

fn default_degree() -> u32 {
    8
}

fn default_mode() -> WarpMode {
    WarpMode::Plain
}

impl Default for ExpansionSection {
    fn default() -> Self {
        ExpansionSection {
            order: default_order(),
            degree: default_degree(),
            mode: default_mode(),
            beta: None,
            c_target: None,
            tau_max: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    #[serde(default = "default_gh")]
    pub gh_order: usize,
    #[serde(default = "default_gl")]
    pub gl_order: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_gh() -> usize {
    40
}

fn default_gl() -> usize {
    32
}

fn default_steps() -> usize {
    64
}

impl Default for QuadratureSection {
    fn default() -> Self {
        QuadratureSection {
            gh_order: default_gh(),
            gl_order: default_gl(),
            steps: default_steps(),
        }
    }
}

/// Output grid; defaults to the domain box and the horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_ppa")]
    pub points_per_axis: usize,
    #[serde(default)]
    pub lower: Option<Vec<f64>>,
    #[serde(default)]
    pub upper: Option<Vec<f64>>,
    #[serde(default)]
    pub times: Option<Vec<f64>>,
}

fn default_ppa() -> usize {
    21
}

/// Problem file as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dimension: usize,
    #[serde(default = "one")]
    pub components: usize,
    #[serde(default)]
    pub drift: Vec<DriftEntry>,
    #[serde(default)]
    pub potential: Vec<PotentialEntry>,
    pub domain: DomainSection,
    pub horizon: f64,
    pub problem: ProblemSection,
    #[serde(default)]
    pub expansion: ExpansionSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub output: Option<OutputSection>,
    /// Bound `C` on the coefficients used by β selection; 1 when absent.
    #[serde(default)]
    pub bound_c: Option<f64>,
}

fn one() -> usize {
    1
}

/// Command-line overrides of file settings.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub order: Option<usize>,
    pub degree: Option<u32>,
    pub mode: Option<WarpMode>,
    pub beta: Option<f64>,
    pub c_target: Option<f64>,
    pub gh_order: Option<usize>,
    pub gl_order: Option<usize>,
    pub steps: Option<usize>,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: ProblemFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::schema(path, e.into_inner().to_string())
        })?;
        file.validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Semantic checks beyond the JSON shape; errors carry JSON paths.
    pub fn validate(&self) -> Result<()> {
        let n = self.dimension;
        if n == 0 {
            return Err(Error::schema("dimension", "must be >= 1"));
        }
        if self.components == 0 {
            return Err(Error::schema("components", "must be >= 1"));
        }
        for (name, v) in [
            ("domain.lower", &self.domain.lower),
            ("domain.upper", &self.domain.upper),
        ] {
            check_vec(name, v, n)?;
        }
        for (a, (lo, hi)) in self.domain.lower.iter().zip(&self.domain.upper).enumerate() {
            if lo >= hi {
                return Err(Error::schema(
                    format!("domain.upper[{a}]"),
                    "must exceed the lower bound",
                ));
            }
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::schema("horizon", "must be positive and finite"));
        }
        for (e, d) in self.drift.iter().enumerate() {
            let at = format!("drift[{e}]");
            if d.i >= self.components {
                return Err(Error::schema(
                    format!("{at}.i"),
                    format!("equation index {} >= components {}", d.i, self.components),
                ));
            }
            if d.j >= self.components {
                return Err(Error::schema(
                    format!("{at}.j"),
                    format!("component index {} >= components {}", d.j, self.components),
                ));
            }
            if d.k >= n {
                return Err(Error::schema(
                    format!("{at}.k"),
                    format!("axis {} >= dimension {n}", d.k),
                ));
            }
            check_coefficient(&at, &d.coefficient, n)?;
            if self.drift[..e].iter().any(|o| (o.i, o.j, o.k) == (d.i, d.j, d.k)) {
                return Err(Error::schema(at, "duplicate drift entry"));
            }
        }
        for (e, p) in self.potential.iter().enumerate() {
            let at = format!("potential[{e}]");
            if p.i >= self.components {
                return Err(Error::schema(
                    format!("{at}.i"),
                    format!("equation index {} >= components {}", p.i, self.components),
                ));
            }
            check_coefficient(&at, &p.coefficient, n)?;
            if self.potential[..e].iter().any(|o| o.i == p.i) {
                return Err(Error::schema(at, "duplicate potential entry"));
            }
        }
        let pr = &self.problem;
        for (name, r) in [
            ("problem.phi", pr.phi.validate(n)),
            ("problem.f", pr.f.validate(n)),
            ("problem.alpha", pr.alpha.validate(n)),
            ("problem.psi", pr.psi.validate(n)),
        ] {
            r.map_err(|e| Error::schema(name, e.to_string()))?;
        }
        match pr.kind {
            ProblemKind::Ibvp2 if n != 1 => return Err(Error::schema("problem.kind", "ibvp2 needs dimension 1")),
            ProblemKind::Burgers => match pr.nu {
                Some(nu) if nu > 0.0 && nu.is_finite() => {}
                _ => return Err(Error::schema("problem.nu", "burgers needs nu > 0")),
            },
            _ => {}
        }
        let ex = &self.expansion;
        if ex.degree == 0 {
            return Err(Error::schema("expansion.degree_D", "must be >= 1"));
        }
        for (name, v) in [("expansion.beta", ex.beta), ("expansion.c_target", ex.c_target)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::schema(name, "must be positive and finite"));
                }
            }
        }
        if let Some(t) = ex.tau_max {
            if !(0.0..1.0).contains(&t) {
                return Err(Error::schema("expansion.tau_max", "must lie in [0, 1)"));
            }
        }
        let q = &self.quadrature;
        for (name, v) in [
            ("quadrature.gh_order", q.gh_order),
            ("quadrature.gl_order", q.gl_order),
            ("quadrature.steps", q.steps),
        ] {
            if v == 0 {
                return Err(Error::schema(name, "must be >= 1"));
            }
        }
        if let Some(o) = &self.output {
            if o.points_per_axis == 0 {
                return Err(Error::schema("output.points_per_axis", "must be >= 1"));
            }
            if let Some(v) = &o.lower {
                check_vec("output.lower", v, n)?;
            }
            if let Some(v) = &o.upper {
                check_vec("output.upper", v, n)?;
            }
            if let Some(ts) = &o.times {
                for (i, &t) in ts.iter().enumerate() {
                    if !(t > 0.0 && t <= self.horizon) {
                        return Err(Error::schema(format!("output.times[{i}]"), "must lie in (0, horizon]"));
                    }
                }
                if ts.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::schema("output.times", "must be increasing"));
                }
            }
        }
        if let Some(c) = self.bound_c {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::schema("bound_c", "must be positive and finite"));
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<BoxDomain> {
        BoxDomain::new(self.domain.lower.clone(), self.domain.upper.clone())
    }

    pub fn coefficients(&self) -> Result<ProblemCoefficients> {
        let n = self.dimension;
        let mut pc = ProblemCoefficients::new(n, self.components, self.domain()?)?;
        for d in &self.drift {
            pc = pc.with_drift(d.i, d.j, d.k, to_coefficient(&d.coefficient, n)?)?;
        }
        for p in &self.potential {
            pc = pc.with_potential(p.i, to_coefficient(&p.coefficient, n)?)?;
        }
        if let Some(c) = self.bound_c {
            pc = pc.with_bound(c)?;
        }
        Ok(pc)
    }

    pub fn output(&self) -> Result<OutputSpec> {
        let o = self.output.clone().unwrap_or(OutputSection {
            points_per_axis: default_ppa(),
            lower: None,
            upper: None,
            times: None,
        });
        let lower = o.lower.unwrap_or_else(|| self.domain.lower.clone());
        let upper = o.upper.unwrap_or_else(|| self.domain.upper.clone());
        Ok(OutputSpec {
            grid: Grid::uniform(&lower, &upper, o.points_per_axis)?,
            times: o.times.unwrap_or_else(|| vec![self.horizon]),
        })
    }

    pub fn spec(&self) -> Result<ProblemSpec> {
        let pc = self.coefficients()?;
        let mut ps = ProblemSpec::cauchy(pc, self.problem.phi.clone(), self.horizon, self.output()?);
        ps.kind = self.problem.kind;
        ps.source = self.problem.f.clone();
        ps.alpha = self.problem.alpha.clone();
        ps.psi = self.problem.psi.clone();
        ps.nu = self.problem.nu;
        ps.validate()?;
        Ok(ps)
    }

    /// Time parametrization from the file and overrides; the note explains automatic choices.
    pub fn warp(&self, pc: &ProblemCoefficients, ov: &Overrides) -> Result<(WarpParams, Option<String>)> {
        let ex = &self.expansion;
        let beta = ov.beta.or(ex.beta);
        match ov.mode.unwrap_or(ex.mode) {
            WarpMode::Plain => Ok((WarpParams::plain(), None)),
            WarpMode::Beta => match beta {
                Some(b) => Ok((WarpParams::beta(b)?, None)),
                None => {
                    let sel = select_beta(pc)?;
                    let note = format!("beta = {:e} from the admissibility bound", sel.params.beta);
                    Ok((sel.params, Some(note)))
                }
            },
            WarpMode::Tau => {
                if let Some(c) = ov.c_target.or(ex.c_target) {
                    let s = warp_schedule(self.horizon, c)?;
                    return Ok((s.params, Some(s.note)));
                }
                let (b, note) = match beta {
                    Some(b) => (b, None),
                    None => {
                        let b = select_beta(pc)?.params.beta;
                        (b, Some(format!("beta = {b:e} from the admissibility bound")))
                    }
                };
                let tau_max = match ex.tau_max {
                    Some(t) => t,
                    None => tau_of_t(self.horizon, b)?.min(1.0 - 1e-12),
                };
                Ok((WarpParams::tau(b, tau_max)?, note))
            }
        }
    }

    pub fn expansion_config(
        &self,
        pc: &ProblemCoefficients,
        ov: &Overrides,
    ) -> Result<(ExpansionConfig, Option<String>)> {
        let (warp, note) = self.warp(pc, ov)?;
        let order = ov.order.unwrap_or(self.expansion.order);
        let degree = ov.degree.unwrap_or(self.expansion.degree);
        if degree == 0 {
            return Err(Error::Parameter("degree must be >= 1".into()));
        }
        let mut cfg = ExpansionConfig::new(order, degree, warp);
        cfg.reference_time = warp.to_internal(self.horizon.min(warp.horizon()));
        Ok((cfg, note))
    }

    pub fn quad_config(&self, ov: &Overrides) -> QuadConfig {
        QuadConfig {
            gh_order: ov.gh_order.unwrap_or(self.quadrature.gh_order),
            gl_order: ov.gl_order.unwrap_or(self.quadrature.gl_order),
            ..QuadConfig::default()
        }
    }

    pub fn steps(&self, ov: &Overrides) -> usize {
        ov.steps.unwrap_or(self.quadrature.steps)
    }
}

fn check_vec(name: &str, v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::schema(name, format!("expected {n} entries, got {}", v.len())));
    }
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::schema(format!("{name}[{i}]"), "must be finite"));
    }
    Ok(())
}

fn check_spatial(at: &str, poly: &[PolyTerm], fourier: &[FourierTerm], n: usize) -> Result<()> {
    for (t, p) in poly.iter().enumerate() {
        if p.exponents.len() != n {
            return Err(Error::schema(
                format!("{at}.poly[{t}].exponents"),
                format!("expected {n} exponents"),
            ));
        }
        if !p.coeff.is_finite() {
            return Err(Error::schema(format!("{at}.poly[{t}].coeff"), "must be finite"));
        }
    }
    for (t, f) in fourier.iter().enumerate() {
        check_vec(&format!("{at}.fourier[{t}].wave"), &f.wave, n)?;
        if !(f.amplitude.is_finite() && f.phase.is_finite()) {
            return Err(Error::schema(
                format!("{at}.fourier[{t}]"),
                "amplitude and phase must be finite",
            ));
        }
    }
    Ok(())
}

fn check_coefficient(at: &str, c: &CoefficientSpec, n: usize) -> Result<()> {
    match c {
        CoefficientSpec::Poly { terms } => check_spatial(at, terms, &[], n).map_err(|e| retarget(e, ".poly", ".terms")),
        CoefficientSpec::Fourier { terms } => {
            check_spatial(at, &[], terms, n).map_err(|e| retarget(e, ".fourier", ".terms"))
        }
        CoefficientSpec::TimePoly { terms } => {
            if terms.is_empty() {
                return Err(Error::schema(format!("{at}.terms"), "needs at least one time term"));
            }
            terms
                .iter()
                .enumerate()
                .try_for_each(|(l, s)| check_spatial(&format!("{at}.terms[{l}]"), &s.poly, &s.fourier, n))
        }
    }
}

fn retarget(e: Error, from: &str, to: &str) -> Error {
    match e {
        Error::Schema { path, message } => Error::Schema {
            path: path.replacen(from, to, 1),
            message,
        },
        other => other,
    }
}

fn to_coefficient(c: &CoefficientSpec, n: usize) -> Result<CoefficientFn> {
    Ok(match c {
        CoefficientSpec::Poly { terms } => CoefficientFn::stationary(SpatialFn::polynomial(n, terms.clone())?),
        CoefficientSpec::Fourier { terms } => CoefficientFn::stationary(SpatialFn::fourier(n, terms.clone())?),
        CoefficientSpec::TimePoly { terms } => CoefficientFn::time_polynomial(
            terms
                .iter()
                .map(|s| SpatialFn::polynomial(n, s.poly.clone())?.plus(&SpatialFn::fourier(n, s.fourier.clone())?))
                .collect::<Result<_>>()?,
        )?,
    })
}
