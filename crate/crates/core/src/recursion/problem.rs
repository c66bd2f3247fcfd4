use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyalg::{binomial, CoefficientFn, MultiIndex, SpatialFn};

/// Axis-aligned box `Π_i [lower_i, upper_i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Parameter(
                "box bounds must be nonempty and of equal length".into(),
            ));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b))
        {
            return Err(Error::Parameter("box must be nondegenerate with finite bounds".into()));
        }
        Ok(BoxDomain { lower, upper })
    }

    /// Symmetric cube `[-half, half]^n`.
    pub fn cube(dim: usize, half: f64) -> Result<Self> {
        Self::new(vec![-half; dim], vec![half; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Radius of the smallest origin-centered ball containing the box.
    pub fn radius(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| a.abs().max(b.abs()).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    /// Tensor lattice with `per_axis` points per coordinate, endpoints included.
    pub fn lattice(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let per_axis = per_axis.max(2);
        let axes: Vec<Vec<f64>> = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| {
                (0..per_axis)
                    .map(|i| a + (b - a) * i as f64 / (per_axis - 1) as f64)
                    .collect()
            })
            .collect();
        let mut pts = vec![Vec::with_capacity(self.dim())];
        for axis in &axes {
            pts = pts
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        pts
    }
}

/// Index of a drift entry `b^i_{jk}`: equation `i`, differentiated component `j`, axis `k`
/// (all zero-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DriftKey {
    pub equation: usize,
    pub component: usize,
    pub axis: usize,
}

/// Coefficients of `∂_t u_i = Δu_i + Σ_{jk} b^i_{jk} ∂_k u_j + V_i u_i` on a bounded box.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemCoefficients {
    dim: usize,
    components: usize,
    drift: BTreeMap<DriftKey, CoefficientFn>,
    potential: BTreeMap<usize, CoefficientFn>,
    bound_c: f64,
    domain: BoxDomain,
    radius: f64,
}

impl ProblemCoefficients {
    /// Zero-drift problem; `components` must be 1 (scalar) or `dim` (system).
    pub fn new(dim: usize, components: usize, domain: BoxDomain) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("dimension must be >= 1".into()));
        }
        if components != 1 && components != dim {
            return Err(Error::Parameter(format!(
                "components must be 1 or the dimension {dim}, got {components}"
            )));
        }
        if domain.dim() != dim {
            return Err(Error::Structural("domain dimension mismatch".into()));
        }
        let radius = domain.radius();
        Ok(ProblemCoefficients {
            dim,
            components,
            drift: BTreeMap::new(),
            potential: BTreeMap::new(),
            bound_c: 1.0,
            domain,
            radius,
        })
    }

    /// Scalar equation `∂_t u = Δu + Σ_k b_k ∂_k u`.
    pub fn scalar(domain: BoxDomain, drift: Vec<CoefficientFn>) -> Result<Self> {
        let mut pc = Self::new(domain.dim(), 1, domain)?;
        for (k, b) in drift.into_iter().enumerate() {
            pc = pc.with_drift(0, 0, k, b)?;
        }
        Ok(pc)
    }

    pub fn with_drift(mut self, equation: usize, component: usize, axis: usize, f: CoefficientFn) -> Result<Self> {
        if equation >= self.components || component >= self.components || axis >= self.dim {
            return Err(Error::Parameter(format!(
                "drift index ({equation},{component},{axis}) out of range"
            )));
        }
        if f.dim() != self.dim {
            return Err(Error::Structural("drift coefficient dimension mismatch".into()));
        }
        self.drift.insert(
            DriftKey {
                equation,
                component,
                axis,
            },
            f,
        );
        Ok(self)
    }

    pub fn with_potential(mut self, equation: usize, f: CoefficientFn) -> Result<Self> {
        if equation >= self.components {
            return Err(Error::Parameter(format!("potential index {equation} out of range")));
        }
        if f.dim() != self.dim {
            return Err(Error::Structural("potential dimension mismatch".into()));
        }
        self.potential.insert(equation, f);
        Ok(self)
    }

    pub fn with_bound(mut self, bound_c: f64) -> Result<Self> {
        if !(bound_c > 0.0 && bound_c.is_finite()) {
            return Err(Error::Parameter("bound constant must be positive".into()));
        }
        self.bound_c = bound_c;
        Ok(self)
    }

    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Parameter("domain radius must be positive".into()));
        }
        self.radius = radius;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn bound_c(&self) -> f64 {
        self.bound_c
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn drift(&self) -> &BTreeMap<DriftKey, CoefficientFn> {
        &self.drift
    }

    pub fn drift_entry(&self, equation: usize, component: usize, axis: usize) -> Option<&CoefficientFn> {
        self.drift.get(&DriftKey {
            equation,
            component,
            axis,
        })
    }

    pub fn potential(&self) -> &BTreeMap<usize, CoefficientFn> {
        &self.potential
    }

    pub fn is_drift_free(&self) -> bool {
        self.drift.values().all(CoefficientFn::is_zero)
    }

    pub fn is_time_dependent(&self) -> bool {
        self.drift
            .values()
            .chain(self.potential.values())
            .any(CoefficientFn::is_time_dependent)
    }

    /// True when every coupling `b^i_{jk}` with `i ≠ j` vanishes.
    pub fn is_decoupled(&self) -> bool {
        self.drift
            .iter()
            .all(|(key, f)| key.equation == key.component || f.is_zero())
    }

    /// The scalar equation obeyed by component `j` of a decoupled system.
    pub fn diagonal_component(&self, j: usize) -> Result<Self> {
        if !self.is_decoupled() {
            return Err(Error::Unsupported("system is coupled".into()));
        }
        let mut pc = Self::new(self.dim, 1, self.domain.clone())?
            .with_bound(self.bound_c)?
            .with_radius(self.radius)?;
        for (key, f) in &self.drift {
            if key.equation == j && key.component == j {
                pc = pc.with_drift(0, 0, key.axis, f.clone())?;
            }
        }
        if let Some(v) = self.potential.get(&j) {
            pc = pc.with_potential(0, v.clone())?;
        }
        Ok(pc)
    }

    /// Coefficients seen from time origin `s`, i.e. `t ↦ b(s + t)`.
    pub fn shifted_in_time(&self, s: f64) -> Result<Self> {
        if s == 0.0 || !self.is_time_dependent() {
            return Ok(self.clone());
        }
        let shift = |f: &CoefficientFn| -> Result<CoefficientFn> {
            let terms = f.time_terms();
            let mut out = Vec::with_capacity(terms.len());
            for m in 0..terms.len() {
                let mut acc = SpatialFn::zero(self.dim);
                for (l, fl) in terms.iter().enumerate().skip(m) {
                    let w = binomial(l as u32, m as u32) * s.powi((l - m) as i32);
                    acc = acc.plus(&fl.scaled(w))?;
                }
                out.push(acc);
            }
            CoefficientFn::time_polynomial(out)
        };
        let mut pc = self.clone();
        for f in pc.drift.values_mut() {
            *f = shift(f)?;
        }
        for f in pc.potential.values_mut() {
            *f = shift(f)?;
        }
        Ok(pc)
    }

    /// Evaluates `b^i_{jk}(t, x)`.
    pub fn drift_value(&self, equation: usize, component: usize, axis: usize, t: f64, x: &[f64]) -> f64 {
        self.drift_entry(equation, component, axis)
            .map_or(0.0, |f| f.eval(t, x))
    }

    pub fn potential_value(&self, equation: usize, t: f64, x: &[f64]) -> f64 {
        self.potential.get(&equation).map_or(0.0, |f| f.eval(t, x))
    }

    /// Spot-checks the coefficient bounds `|∂^α b| ≤ C^{|α|}` (`|α| ≤ 4`) and
    /// `|∂_t^m b| ≤ C m!` (`m ≤ 3`, `t ∈ [0, horizon]`) on a lattice over the domain.
    pub fn admissibility(&self, horizon: f64) -> AdmissibilityReport {
        let c = self.bound_c;
        let mut violations = Vec::new();
        let mut worst: f64 = 0.0;
        let pts = self.domain.lattice(5);
        let times: Vec<f64> = (0..5).map(|i| horizon * i as f64 / 4.0).collect();
        let alphas: Vec<MultiIndex> = (0..=4u32)
            .flat_map(|d| {
                crate::polyalg::MonomialBasis::new(self.dim, d).map(|b| {
                    b.indices()
                        .iter()
                        .filter(|g| g.order() == d)
                        .cloned()
                        .collect::<Vec<_>>()
                })
            })
            .flatten()
            .collect();
        let entries = self
            .drift
            .iter()
            .map(|(k, f)| (format!("drift({},{},{})", k.equation, k.component, k.axis), f))
            .chain(self.potential.iter().map(|(i, f)| (format!("potential({i})"), f)));
        for (name, f) in entries {
            for x in &pts {
                for &t in &times {
                    for a in &alphas {
                        let bound = c.powi(a.order() as i32);
                        let v = f.spatial_derivative(a, t, x).abs();
                        let ratio = v / bound;
                        worst = worst.max(ratio);
                        if ratio > 1.0 + 1e-12 {
                            violations.push(format!("{name}: |d^{a:?}| = {v:.3e} > {bound:.3e} at x={x:?}, t={t}"));
                        }
                    }
                    for m in 0..=3u32 {
                        let bound = c * crate::polyalg::factorial(m);
                        let v = f.time_derivative(m, t, x).abs();
                        worst = worst.max(v / bound);
                        if v > bound * (1.0 + 1e-12) {
                            violations.push(format!("{name}: |d_t^{m}| = {v:.3e} > {bound:.3e} at x={x:?}, t={t}"));
                        }
                    }
                }
            }
        }
        violations.dedup();
        AdmissibilityReport {
            worst_ratio: worst,
            violations,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AdmissibilityReport {
    /// Largest observed `|derivative| / bound`.
    pub worst_ratio: f64,
    pub violations: Vec<String>,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.violations.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> BoxDomain {
        BoxDomain::cube(1, 1.0).unwrap()
    }

    #[test]
    fn component_count_validated() {
        assert!(ProblemCoefficients::new(2, 3, BoxDomain::cube(2, 1.0).unwrap()).is_err());
        assert!(ProblemCoefficients::new(0, 1, line()).is_err());
        assert!(ProblemCoefficients::new(1, 1, line()).unwrap().with_bound(0.0).is_err());
    }

    #[test]
    fn drift_index_out_of_range() {
        let pc = ProblemCoefficients::new(1, 1, line()).unwrap();
        assert!(pc.with_drift(0, 0, 1, CoefficientFn::constant(1, 1.0)).is_err());
    }

    #[test]
    fn time_shift_recenters_polynomial() {
        let b = CoefficientFn::time_polynomial(vec![SpatialFn::constant(1, 0.3), SpatialFn::constant(1, 0.5)]).unwrap();
        let pc = ProblemCoefficients::scalar(line(), vec![b]).unwrap();
        let sh = pc.shifted_in_time(0.4).unwrap();
        for t in [0.0, 0.1, 0.7] {
            let a = pc.drift_value(0, 0, 0, t + 0.4, &[0.2]);
            let b = sh.drift_value(0, 0, 0, t, &[0.2]);
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn admissibility_flags_large_drift() {
        let ok = ProblemCoefficients::scalar(
            line(),
            vec![CoefficientFn::stationary(SpatialFn::sine(1, 0.3, 0, 1.0, 0.0))],
        )
        .unwrap();
        assert!(ok.admissibility(1.0).is_admissible());
        let bad = ProblemCoefficients::scalar(line(), vec![CoefficientFn::constant(1, 3.0)]).unwrap();
        assert!(!bad.admissibility(1.0).is_admissible());
    }

    #[test]
    fn lattice_size() {
        let d = BoxDomain::cube(2, 1.0).unwrap();
        assert_eq!(d.lattice(17).len(), 289);
        assert!((d.radius() - 2f64.sqrt()).abs() < 1e-15);
    }
}
