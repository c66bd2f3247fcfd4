use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyalg::{FourierTerm, PolyTerm, SpatialFn};
use crate::recursion::{BoxDomain, ProblemCoefficients};

/// Gaussian bump `weight · exp(−|x − center|² / width²)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianBump {
    pub weight: f64,
    pub center: Vec<f64>,
    pub width: f64,
}

/// Function of the spatial variable used for initial and boundary data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    Zero,
    Constant {
        value: f64,
    },
    Poly {
        terms: Vec<PolyTerm>,
    },
    Fourier {
        terms: Vec<FourierTerm>,
    },
    Gaussian {
        bumps: Vec<GaussianBump>,
    },
    /// Samples on a uniform 1D grid, linearly interpolated and zero outside.
    Grid {
        lower: f64,
        upper: f64,
        values: Vec<f64>,
    },
    Sum {
        parts: Vec<FunctionSpec>,
    },
}

impl FunctionSpec {
    pub fn gaussian(dim: usize, weight: f64, width: f64) -> Self {
        FunctionSpec::Gaussian {
            bumps: vec![GaussianBump {
                weight,
                center: vec![0.0; dim],
                width,
            }],
        }
    }

    /// `amplitude · cos(k x_axis)` as a sine with phase `π/2`.
    pub fn cosine(dim: usize, amplitude: f64, axis: usize, k: f64) -> Self {
        let mut wave = vec![0.0; dim];
        wave[axis] = k;
        FunctionSpec::Fourier {
            terms: vec![FourierTerm {
                amplitude,
                wave,
                phase: std::f64::consts::FRAC_PI_2,
            }],
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FunctionSpec::Zero => true,
            FunctionSpec::Constant { value } => *value == 0.0,
            FunctionSpec::Sum { parts } => parts.iter().all(FunctionSpec::is_zero),
            _ => false,
        }
    }

    /// Checks finiteness and dimensions against `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{what} must be finite")))
            }
        };
        match self {
            FunctionSpec::Zero => Ok(()),
            FunctionSpec::Constant { value } => finite(*value, "constant"),
            FunctionSpec::Poly { terms } => SpatialFn::polynomial(dim, terms.clone()).map(|_| ()),
            FunctionSpec::Fourier { terms } => SpatialFn::fourier(dim, terms.clone()).map(|_| ()),
            FunctionSpec::Gaussian { bumps } => {
                for b in bumps {
                    if b.center.len() != dim {
                        return Err(Error::Structural("gaussian center dimension mismatch".into()));
                    }
                    finite(b.weight, "gaussian weight")?;
                    if !(b.width > 0.0 && b.width.is_finite()) {
                        return Err(Error::Parameter("gaussian width must be positive".into()));
                    }
                }
                Ok(())
            }
            FunctionSpec::Grid { lower, upper, values } => {
                if dim != 1 {
                    return Err(Error::Unsupported("grid samples are 1D only".into()));
                }
                if !(lower < upper) || values.len() < 2 {
                    return Err(Error::Parameter("grid needs lower < upper and >= 2 samples".into()));
                }
                values.iter().try_for_each(|&v| finite(v, "grid sample"))
            }
            FunctionSpec::Sum { parts } => parts.iter().try_for_each(|p| p.validate(dim)),
        }
    }

    /// Exact Taylor-expandable form, available for polynomial, sine and constant data.
    pub fn to_spatial(&self, dim: usize) -> Result<SpatialFn> {
        match self {
            FunctionSpec::Zero => Ok(SpatialFn::zero(dim)),
            FunctionSpec::Constant { value } => Ok(SpatialFn::constant(dim, *value)),
            FunctionSpec::Poly { terms } => SpatialFn::polynomial(dim, terms.clone()),
            FunctionSpec::Fourier { terms } => SpatialFn::fourier(dim, terms.clone()),
            FunctionSpec::Sum { parts } => parts
                .iter()
                .try_fold(SpatialFn::zero(dim), |acc, p| acc.plus(&p.to_spatial(dim)?)),
            FunctionSpec::Gaussian { .. } | FunctionSpec::Grid { .. } => Err(Error::Unsupported(
                "only polynomial, sine and constant data can enter the expansion coefficients".into(),
            )),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            FunctionSpec::Zero => 0.0,
            FunctionSpec::Constant { value } => *value,
            FunctionSpec::Poly { terms } => terms
                .iter()
                .map(|t| {
                    t.coeff
                        * t.exponents
                            .iter()
                            .zip(x)
                            .map(|(&e, &v)| v.powi(e as i32))
                            .product::<f64>()
                })
                .sum(),
            FunctionSpec::Fourier { terms } => terms
                .iter()
                .map(|t| {
                    let arg: f64 = t.wave.iter().zip(x).map(|(k, v)| k * v).sum();
                    t.amplitude * (arg + t.phase).sin()
                })
                .sum(),
            FunctionSpec::Gaussian { bumps } => bumps
                .iter()
                .map(|b| {
                    let r2: f64 = b.center.iter().zip(x).map(|(c, v)| (v - c).powi(2)).sum();
                    b.weight * (-r2 / (b.width * b.width)).exp()
                })
                .sum(),
            FunctionSpec::Grid { lower, upper, values } => {
                let v = x[0];
                if v < *lower || v > *upper {
                    return 0.0;
                }
                let n = values.len() - 1;
                let pos = (v - lower) / (upper - lower) * n as f64;
                let i = (pos.floor() as usize).min(n - 1);
                let w = pos - i as f64;
                values[i] * (1.0 - w) + values[i + 1] * w
            }
            FunctionSpec::Sum { parts } => parts.iter().map(|p| p.eval(x)).sum(),
        }
    }
}

/// `coeff · t^power · e^{rate t} · space(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableTerm {
    pub coeff: f64,
    #[serde(default)]
    pub rate: f64,
    #[serde(default)]
    pub power: u32,
    pub space: FunctionSpec,
}

/// Sum of separable space-time terms; empty means zero.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpaceTimeFn {
    pub terms: Vec<SeparableTerm>,
}

impl SpaceTimeFn {
    pub fn zero() -> Self {
        SpaceTimeFn { terms: Vec::new() }
    }

    pub fn stationary(space: FunctionSpec) -> Self {
        Self::separable(1.0, 0.0, space)
    }

    /// `coeff · e^{rate t} · space(x)`.
    pub fn separable(coeff: f64, rate: f64, space: FunctionSpec) -> Self {
        SpaceTimeFn {
            terms: vec![SeparableTerm {
                coeff,
                rate,
                power: 0,
                space,
            }],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == 0.0 || t.space.is_zero())
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        for t in &self.terms {
            if !(t.coeff.is_finite() && t.rate.is_finite()) {
                return Err(Error::Parameter("space-time term must be finite".into()));
            }
            t.space.validate(dim)?;
        }
        Ok(())
    }

    pub fn eval(&self, t: f64, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|s| s.coeff * t.powi(s.power as i32) * (s.rate * t).exp() * s.space.eval(x))
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Cauchy,
    Ibvp2,
    Burgers,
}

/// Tensor lattice; points are ordered with the last axis varying fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub axes: Vec<Vec<f64>>,
}

impl Grid {
    pub fn uniform(lower: &[f64], upper: &[f64], points_per_axis: usize) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::Structural("grid bounds mismatch".into()));
        }
        if points_per_axis == 0 {
            return Err(Error::Parameter("grid needs at least one point per axis".into()));
        }
        let axes = lower
            .iter()
            .zip(upper)
            .map(|(a, b)| {
                if points_per_axis == 1 {
                    return vec![0.5 * (a + b)];
                }
                (0..points_per_axis)
                    .map(|i| a + (b - a) * i as f64 / (points_per_axis - 1) as f64)
                    .collect()
            })
            .collect();
        Ok(Grid { axes })
    }

    pub fn from_points_1d(points: Vec<f64>) -> Self {
        Grid { axes: vec![points] }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, mut index: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.dim()];
        for (d, axis) in self.axes.iter().enumerate().rev() {
            p[d] = axis[index % axis.len()];
            index /= axis.len();
        }
        p
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

/// Where and when to report a solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub grid: Grid,
    pub times: Vec<f64>,
}

/// A Cauchy, second-type boundary, or Burgers problem.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub domain: BoxDomain,
    pub horizon: f64,
    pub coefficients: ProblemCoefficients,
    /// Initial datum `φ` (for Burgers: the potential `Φ_0`).
    pub phi: FunctionSpec,
    pub source: SpaceTimeFn,
    pub alpha: SpaceTimeFn,
    pub psi: SpaceTimeFn,
    pub nu: Option<f64>,
    pub output: OutputSpec,
}

impl ProblemSpec {
    pub fn cauchy(coefficients: ProblemCoefficients, phi: FunctionSpec, horizon: f64, output: OutputSpec) -> Self {
        ProblemSpec {
            kind: ProblemKind::Cauchy,
            domain: coefficients.domain().clone(),
            horizon,
            coefficients,
            phi,
            source: SpaceTimeFn::zero(),
            alpha: SpaceTimeFn::zero(),
            psi: SpaceTimeFn::zero(),
            nu: None,
            output,
        }
    }

    pub fn with_source(mut self, f: SpaceTimeFn) -> Self {
        self.source = f;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.coefficients.dim();
        if self.domain.dim() != n {
            return Err(Error::Structural(
                "domain and coefficients disagree on dimension".into(),
            ));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Parameter("horizon must be positive".into()));
        }
        self.phi.validate(n)?;
        self.source.validate(n)?;
        self.alpha.validate(n)?;
        self.psi.validate(n)?;
        if self.output.grid.dim() != n {
            return Err(Error::Structural("output grid dimension mismatch".into()));
        }
        if self
            .output
            .times
            .iter()
            .any(|&t| !(t > 0.0 && t <= self.horizon * (1.0 + 1e-12)))
        {
            return Err(Error::Parameter("output times must lie in (0, horizon]".into()));
        }
        if self.output.times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter("output times must be increasing".into()));
        }
        match self.kind {
            ProblemKind::Ibvp2 if n != 1 => Err(Error::Unsupported(
                "second-type boundary problems are implemented for n = 1".into(),
            )),
            ProblemKind::Burgers => match self.nu {
                Some(nu) if nu > 0.0 && nu.is_finite() => Ok(()),
                _ => Err(Error::Parameter("burgers problems need viscosity nu > 0".into())),
            },
            _ => Ok(()),
        }
    }
}

/// Run metadata attached to a [`GridSolution`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveMeta {
    pub method: String,
    pub order: Option<usize>,
    pub degree: Option<u32>,
    pub gh_order: Option<usize>,
    pub gl_order: Option<usize>,
    pub steps: Option<usize>,
}

/// Values on `times × grid × components`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSolution {
    pub times: Vec<f64>,
    pub grid: Grid,
    pub components: usize,
    /// Flattened `[time][point][component]`.
    pub values: Vec<f64>,
    pub meta: SolveMeta,
}

impl GridSolution {
    pub fn new(times: Vec<f64>, grid: Grid, components: usize, values: Vec<f64>, meta: SolveMeta) -> Result<Self> {
        if values.len() != times.len() * grid.len() * components {
            return Err(Error::Structural("solution values do not match grid size".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Accuracy("solution contains non-finite values".into()));
        }
        Ok(GridSolution {
            times,
            grid,
            components,
            values,
            meta,
        })
    }

    pub fn value(&self, time: usize, point: usize, component: usize) -> f64 {
        self.values[(time * self.grid.len() + point) * self.components + component]
    }

    /// Values of one component at one time, in grid order.
    pub fn slice(&self, time: usize, component: usize) -> Vec<f64> {
        (0..self.grid.len()).map(|p| self.value(time, p, component)).collect()
    }

    /// Largest pointwise difference, optionally restricted to points satisfying `filter`.
    pub fn max_abs_diff(&self, other: &GridSolution, filter: impl Fn(&[f64]) -> bool) -> Result<f64> {
        if self.values.len() != other.values.len() || self.grid != other.grid {
            return Err(Error::Structural("solutions live on different grids".into()));
        }
        let mut worst: f64 = 0.0;
        for ti in 0..self.times.len() {
            for p in 0..self.grid.len() {
                if !filter(&self.grid.point(p)) {
                    continue;
                }
                for c in 0..self.components {
                    worst = worst.max((self.value(ti, p, c) - other.value(ti, p, c)).abs());
                }
            }
        }
        Ok(worst)
    }

    /// CSV with columns `t, x1..xn, component, value`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        let n = self.grid.dim();
        let header: Vec<String> = std::iter::once("t".to_string())
            .chain((1..=n).map(|i| format!("x{i}")))
            .chain(["component".to_string(), "value".to_string()])
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for (ti, t) in self.times.iter().enumerate() {
            for p in 0..self.grid.len() {
                let x = self.grid.point(p);
                for c in 0..self.components {
                    let xs: Vec<String> = x.iter().map(|v| format!("{v:e}")).collect();
                    writeln!(w, "{t:e},{},{c},{:e}", xs.join(","), self.value(ti, p, c))?;
                }
            }
        }
        Ok(())
    }
}

/// Boundary density `γ` of the second-type boundary representation, sampled at the
/// collocation times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDensity {
    pub times: Vec<f64>,
    pub points: Vec<f64>,
    /// `values[q][m]`: density at boundary point `q`, time `times[m]`.
    pub values: Vec<Vec<f64>>,
}

impl BoundaryDensity {
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "t,x,value")?;
        for (m, t) in self.times.iter().enumerate() {
            for (q, x) in self.points.iter().enumerate() {
                writeln!(w, "{t:e},{x:e},{:e}", self.values[q][m])?;
            }
        }
        Ok(())
    }
}
