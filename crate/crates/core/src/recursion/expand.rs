use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyalg::{MonomialBasis, TaylorPoly, TimeJet, TimeVar};

use super::problem::{DriftKey, ProblemCoefficients};
use super::ray::ray_integrate_jet;
use super::warp::{RecursionSeries, WarpMode, WarpParams};

/// Settings for [`expand`].
#[derive(Clone, Debug)]
pub struct ExpansionConfig {
    /// Highest order `K` of the log-correction.
    pub order: usize,
    /// Spatial Taylor degree `D`.
    pub degree: u32,
    /// Time-jet truncation; defaults to `max(K, time degree of the coefficients)`.
    pub jet_cap: Option<usize>,
    pub warp: WarpParams,
    /// Physical time at which the kernel starts.
    pub time_origin: f64,
    /// Internal time at which `sup |c_k| s^k` is reported.
    pub reference_time: f64,
    /// Monomial basis to reuse across many centers.
    pub basis: Option<Arc<MonomialBasis>>,
    /// Whether to sample sup-norms on a domain lattice (NaN placeholders otherwise).
    pub sample_diagnostics: bool,
}

impl ExpansionConfig {
    pub fn new(order: usize, degree: u32, warp: WarpParams) -> Self {
        ExpansionConfig {
            order,
            degree,
            jet_cap: None,
            warp,
            time_origin: 0.0,
            reference_time: 0.5,
            basis: None,
            sample_diagnostics: true,
        }
    }

    /// Shares one precomputed basis between expansions; it must match `degree`.
    pub fn with_shared_basis(mut self, dim: usize) -> Result<Self> {
        self.basis = Some(MonomialBasis::new(dim, self.degree)?);
        Ok(self)
    }

    pub fn with_time_origin(mut self, s: f64) -> Self {
        self.time_origin = s;
        self
    }

    pub fn with_jet_cap(mut self, cap: usize) -> Self {
        self.jet_cap = Some(cap);
        self
    }
}

/// Builds the coefficient recursion for one expansion center.
pub struct Recursion {
    basis: Arc<MonomialBasis>,
    center: Vec<f64>,
    components: usize,
    dim: usize,
    var: TimeVar,
    cap: usize,
    series: RecursionSeries,
    drift: BTreeMap<DriftKey, TimeJet>,
    potential: Vec<Option<TimeJet>>,
}

impl Recursion {
    pub fn new(pc: &ProblemCoefficients, center: &[f64], cfg: &ExpansionConfig) -> Result<Self> {
        if center.len() != pc.dim() {
            return Err(Error::Structural(format!(
                "center has dimension {}, problem has {}",
                center.len(),
                pc.dim()
            )));
        }
        if center.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("center must be finite".into()));
        }
        if cfg.degree == 0 {
            return Err(Error::Parameter("Taylor degree must be >= 1".into()));
        }
        cfg.warp.validate()?;
        let pc = pc.shifted_in_time(cfg.time_origin)?;
        let time_degree = pc
            .drift()
            .values()
            .chain(pc.potential().values())
            .map(|f| f.time_terms().len() - 1)
            .max()
            .unwrap_or(0);
        let cap = cfg.jet_cap.unwrap_or(cfg.order.max(time_degree));
        let basis = match &cfg.basis {
            Some(b) if b.dim() == pc.dim() && b.degree() == cfg.degree => b.clone(),
            _ => MonomialBasis::new(pc.dim(), cfg.degree)?,
        };
        let var = match cfg.warp.mode {
            WarpMode::Plain => TimeVar::T,
            _ => TimeVar::Tau,
        };
        let time_map = cfg.warp.time_map(cap);
        let radius = pc.radius();
        let mut drift = BTreeMap::new();
        for (key, f) in pc.drift() {
            if f.is_zero() {
                continue;
            }
            drift.insert(*key, f.taylorize_jet(&basis, center, radius, var, cap, &time_map)?);
        }
        let mut potential = vec![None; pc.components()];
        for (&i, f) in pc.potential() {
            if !f.is_zero() {
                potential[i] = Some(f.taylorize_jet(&basis, center, radius, var, cap, &time_map)?);
            }
        }
        Ok(Recursion {
            basis,
            center: center.to_vec(),
            components: pc.components(),
            dim: pc.dim(),
            var,
            cap,
            series: cfg.warp.recursion_series(cap),
            drift,
            potential,
        })
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    pub fn jet_cap(&self) -> usize {
        self.cap
    }

    fn zero_jet(&self) -> Result<TimeJet> {
        Ok(TimeJet::from_poly(
            self.var,
            self.cap,
            TaylorPoly::zero(&self.basis, &self.center)?,
        ))
    }

    fn check_component(&self, j: usize) -> Result<()> {
        if j >= self.components {
            return Err(Error::Parameter(format!("component {j} out of range")));
        }
        Ok(())
    }

    /// `c_0^j = −½ Σ_m Δx_m ∫_0^1 Σ_l b^j_{lm}(y + sΔx) ds`.
    pub fn c0(&self, j: usize) -> Result<TimeJet> {
        self.check_component(j)?;
        let mut out = self.zero_jet()?;
        for m in 0..self.dim {
            let mut col = self.zero_jet()?;
            for (key, b) in &self.drift {
                if key.equation == j && key.axis == m {
                    col.axpy(1.0, b)?;
                }
            }
            if col.is_zero() {
                continue;
            }
            let avg = ray_integrate_jet(&col, 1.0)?;
            let term = avg.map_terms(|p| Ok(p.mul_coordinate(m)))?;
            out.axpy(-0.5, &term)?;
        }
        Ok(out)
    }

    /// Source `R_{k−1}^j` of the order-`k` transport equation, given `prior[l][r]` for all
    /// components `l` and orders `r < k`.
    pub fn source(&self, k: usize, prior: &[Vec<TimeJet>], j: usize) -> Result<TimeJet> {
        self.check_component(j)?;
        if k == 0 {
            return Err(Error::Sequencing("order 0 has no source; use c0".into()));
        }
        if prior.len() != self.components || prior.iter().any(|c| c.len() < k) {
            return Err(Error::Sequencing(format!(
                "source for order {k} needs orders 0..{} of every component",
                k - 1
            )));
        }
        let cj = &prior[j];
        let prev = &cj[k - 1];

        // S = Δc_{k−1} + Σ_r ∇c_r·∇c_{k−1−r} + Σ b^j_{lm} ∂_m c^l_{k−1} + Ṽ_{k−1}.
        let mut s = prev.laplacian();
        for r in 0..k {
            let q = k - 1 - r;
            if q < r {
                break;
            }
            let w = if q == r { 1.0 } else { 2.0 };
            for i in 0..self.dim {
                let a = cj[r].partial(i)?;
                if a.is_zero() {
                    continue;
                }
                let b = if q == r { a.clone() } else { cj[q].partial(i)? };
                s.axpy(w, &a.mul(&b)?)?;
            }
        }
        for (key, b) in &self.drift {
            if key.equation != j {
                continue;
            }
            let d = prior[key.component][k - 1].partial(key.axis)?;
            if !d.is_zero() {
                s.axpy(1.0, &b.mul(&d)?)?;
            }
        }
        if let Some(v) = &self.potential[j] {
            if k - 1 < v.terms().len() {
                let term = TimeJet::from_poly(self.var, self.cap, v.terms()[k - 1].clone());
                s.axpy(1.0, &term)?;
            }
        }

        let mut out = s.mul_series(&self.series.u).scale(self.series.scale);
        out.axpy(-1.0, &prev.time_derivative().mul_series(&self.series.q))?;
        if k > 1 && !self.series.r.is_empty() {
            out.axpy(-((k - 1) as f64), &prev.mul_series(&self.series.r))?;
        }
        Ok(out)
    }

    /// `c_k = ∫_0^1 s^{k−1} R_{k−1}(y + sΔx) ds`.
    pub fn solve_order(&self, k: usize, source: &TimeJet) -> Result<TimeJet> {
        ray_integrate_jet(source, k as f64)
    }
}

/// Value and derivatives of the log-correction `W = Σ_k c_k s^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogCorrection {
    pub w: f64,
    pub grad: Vec<f64>,
    pub laplacian: f64,
    /// `∂W/∂t` in physical time.
    pub dt: f64,
}

#[derive(Clone, Debug)]
pub struct Diagnostics {
    /// Internal time `s` used for the scaled norms.
    pub reference_time: f64,
    /// `sup_x |c_k(s, x)|` over a lattice of the domain, max over components.
    pub sup_norms: Vec<f64>,
    /// `sup_norms[k] · s^k`.
    pub scaled: Vec<f64>,
    /// Whether any degree or jet truncation touched order `k`.
    pub truncated: Vec<bool>,
    pub lattice_points: usize,
}

/// Log-correction coefficients `c_k^j` about one center.
#[derive(Clone, Debug)]
pub struct ExpansionCoeffs {
    warp: WarpParams,
    order: usize,
    degree: u32,
    jet_cap: usize,
    center: Vec<f64>,
    time_origin: f64,
    coeffs: Vec<Vec<TimeJet>>,
    grads: Vec<Vec<Vec<TimeJet>>>,
    laps: Vec<Vec<TimeJet>>,
    pub diagnostics: Diagnostics,
}

/// Computes `c_0, …, c_K` for every component about `center`.
pub fn expand(pc: &ProblemCoefficients, center: &[f64], cfg: &ExpansionConfig) -> Result<ExpansionCoeffs> {
    let rec = Recursion::new(pc, center, cfg)?;
    let comps = pc.components();
    let mut coeffs: Vec<Vec<TimeJet>> = (0..comps).map(|j| rec.c0(j).map(|c| vec![c])).collect::<Result<_>>()?;
    for k in 1..=cfg.order {
        let next = (0..comps)
            .map(|j| rec.source(k, &coeffs, j).and_then(|r| rec.solve_order(k, &r)))
            .collect::<Result<Vec<_>>>()?;
        for (j, c) in next.into_iter().enumerate() {
            if c.terms().iter().flat_map(|p| p.coeffs()).any(|v| !v.is_finite()) {
                return Err(Error::Scaling(format!("non-finite coefficient at order {k}")));
            }
            coeffs[j].push(c);
        }
    }
    let grads = coeffs
        .iter()
        .map(|cs| {
            cs.iter()
                .map(|c| (0..pc.dim()).map(|i| c.partial(i)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let laps = coeffs
        .iter()
        .map(|cs| cs.iter().map(TimeJet::laplacian).collect())
        .collect();
    let diagnostics = diagnostics(pc, center, &coeffs, cfg.reference_time, cfg.sample_diagnostics);
    Ok(ExpansionCoeffs {
        warp: cfg.warp,
        order: cfg.order,
        degree: cfg.degree,
        jet_cap: rec.jet_cap(),
        center: center.to_vec(),
        time_origin: cfg.time_origin,
        coeffs,
        grads,
        laps,
        diagnostics,
    })
}

fn diagnostics(pc: &ProblemCoefficients, center: &[f64], coeffs: &[Vec<TimeJet>], s: f64, sample: bool) -> Diagnostics {
    let n = pc.dim();
    let per_axis = ((4913f64).powf(1.0 / n as f64).floor() as usize).clamp(2, 17);
    let pts = if sample {
        pc.domain().lattice(per_axis)
    } else {
        Vec::new()
    };
    let orders = coeffs[0].len();
    let init = if sample { 0.0 } else { f64::NAN };
    let mut sup_norms = vec![init; orders];
    let mut truncated = vec![false; orders];
    for cs in coeffs {
        for (k, c) in cs.iter().enumerate() {
            truncated[k] |= c.truncated();
            for x in &pts {
                let dx: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                sup_norms[k] = sup_norms[k].max(c.eval_offset(&dx, s).abs());
            }
        }
    }
    let scaled = sup_norms
        .iter()
        .enumerate()
        .map(|(k, v)| v * s.powi(k as i32))
        .collect();
    Diagnostics {
        reference_time: s,
        sup_norms,
        scaled,
        truncated,
        lattice_points: pts.len(),
    }
}

/// Value and `d/ds` of a jet at `Δx`.
fn jet_value_rate(jet: &TimeJet, dx: &[f64], s: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut dv = 0.0;
    for p in jet.terms().iter().rev() {
        dv = dv * s + v;
        v = v * s + p.eval_offset(dx);
    }
    (v, dv)
}

impl ExpansionCoeffs {
    pub fn warp(&self) -> &WarpParams {
        &self.warp
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn jet_cap(&self) -> usize {
        self.jet_cap
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn time_origin(&self) -> f64 {
        self.time_origin
    }

    pub fn components(&self) -> usize {
        self.coeffs.len()
    }

    /// `c_k^j` as a time jet.
    pub fn coeff(&self, j: usize, k: usize) -> &TimeJet {
        &self.coeffs[j][k]
    }

    pub fn truncated(&self) -> bool {
        self.diagnostics.truncated.iter().any(|&t| t)
    }

    /// `W^j` at physical time `t` (measured from the time origin) and point `x`.
    pub fn exponent(&self, j: usize, t: f64, x: &[f64]) -> f64 {
        let s = self.warp.to_internal(t);
        let dx: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        self.coeffs[j]
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * s + c.eval_offset(&dx, s))
    }

    /// `W^j` with its spatial gradient, Laplacian and physical time derivative.
    pub fn correction(&self, j: usize, t: f64, x: &[f64]) -> LogCorrection {
        let s = self.warp.to_internal(t);
        let rate = self.warp.internal_rate(t);
        let dx: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        let n = dx.len();
        let mut w = 0.0;
        let mut ds = 0.0;
        let mut grad = vec![0.0; n];
        let mut lap = 0.0;
        let mut sk = 1.0;
        for k in 0..self.coeffs[j].len() {
            let (v, dv) = jet_value_rate(&self.coeffs[j][k], &dx, s);
            w += v * sk;
            ds += dv * sk;
            if k > 0 {
                ds += k as f64 * v * s.powi(k as i32 - 1);
            }
            for (i, g) in grad.iter_mut().enumerate() {
                *g += self.grads[j][k][i].eval_offset(&dx, s) * sk;
            }
            lap += self.laps[j][k].eval_offset(&dx, s) * sk;
            sk *= s;
        }
        LogCorrection {
            w,
            grad,
            laplacian: lap,
            dt: ds * rate,
        }
    }
}

/// Plain-data form of [`ExpansionCoeffs`] for serialization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRecord {
    pub warp: WarpParams,
    pub order: usize,
    pub degree: u32,
    pub jet_cap: usize,
    pub center: Vec<f64>,
    pub time_origin: f64,
    pub time_var: TimeVar,
    /// `coefficients[j][k][l]`: coefficients of `s^l` in `c_k^j`, in basis order.
    pub coefficients: Vec<Vec<Vec<Vec<f64>>>>,
    /// Truncation flag per `(j, k)`.
    pub truncated: Vec<Vec<bool>>,
    pub diagnostics: DiagnosticsRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub reference_time: f64,
    /// `None` where the norms were not sampled.
    pub sup_norms: Vec<Option<f64>>,
    pub scaled: Vec<Option<f64>>,
    pub truncated: Vec<bool>,
    pub lattice_points: usize,
}

fn finite_or_none(v: &[f64]) -> Vec<Option<f64>> {
    v.iter().map(|x| x.is_finite().then_some(*x)).collect()
}

impl ExpansionCoeffs {
    pub fn to_record(&self) -> ExpansionRecord {
        let d = &self.diagnostics;
        ExpansionRecord {
            warp: self.warp,
            order: self.order,
            degree: self.degree,
            jet_cap: self.jet_cap,
            center: self.center.clone(),
            time_origin: self.time_origin,
            time_var: self.coeffs[0][0].var(),
            coefficients: self
                .coeffs
                .iter()
                .map(|cs| {
                    cs.iter()
                        .map(|c| c.terms().iter().map(|p| p.coeffs().to_vec()).collect())
                        .collect()
                })
                .collect(),
            truncated: self
                .coeffs
                .iter()
                .map(|cs| cs.iter().map(TimeJet::truncated).collect())
                .collect(),
            diagnostics: DiagnosticsRecord {
                reference_time: d.reference_time,
                sup_norms: finite_or_none(&d.sup_norms),
                scaled: finite_or_none(&d.scaled),
                truncated: d.truncated.clone(),
                lattice_points: d.lattice_points,
            },
        }
    }

    /// Rebuilds the expansion; derived tables are recomputed exactly as in [`expand`].
    pub fn from_record(rec: &ExpansionRecord) -> Result<Self> {
        rec.warp.validate()?;
        let n = rec.center.len();
        if n == 0 || rec.coefficients.is_empty() {
            return Err(Error::Structural("record has no center or no components".into()));
        }
        let basis = MonomialBasis::new(n, rec.degree)?;
        let mut coeffs = Vec::with_capacity(rec.coefficients.len());
        for (j, cs) in rec.coefficients.iter().enumerate() {
            if cs.len() != rec.order + 1 {
                return Err(Error::Structural(format!(
                    "component {j} has {} orders, expected {}",
                    cs.len(),
                    rec.order + 1
                )));
            }
            let mut jets = Vec::with_capacity(cs.len());
            for (k, terms) in cs.iter().enumerate() {
                let mut polys = terms
                    .iter()
                    .map(|c| TaylorPoly::from_coeffs(&basis, &rec.center, c.clone()))
                    .collect::<Result<Vec<_>>>()?;
                if rec.truncated.get(j).and_then(|t| t.get(k)).copied().unwrap_or(false) {
                    if let Some(p) = polys.first_mut() {
                        p.mark_truncated();
                    }
                }
                jets.push(TimeJet::from_terms(rec.time_var, rec.jet_cap, polys)?);
            }
            coeffs.push(jets);
        }
        let grads = coeffs
            .iter()
            .map(|cs| {
                cs.iter()
                    .map(|c| (0..n).map(|i| c.partial(i)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let laps = coeffs
            .iter()
            .map(|cs| cs.iter().map(TimeJet::laplacian).collect())
            .collect();
        let d = &rec.diagnostics;
        let unwrap = |v: &[Option<f64>]| v.iter().map(|x| x.unwrap_or(f64::NAN)).collect();
        Ok(ExpansionCoeffs {
            warp: rec.warp,
            order: rec.order,
            degree: rec.degree,
            jet_cap: rec.jet_cap,
            center: rec.center.clone(),
            time_origin: rec.time_origin,
            coeffs,
            grads,
            laps,
            diagnostics: Diagnostics {
                reference_time: d.reference_time,
                sup_norms: unwrap(&d.sup_norms),
                scaled: unwrap(&d.scaled),
                truncated: d.truncated.clone(),
                lattice_points: d.lattice_points,
            },
        })
    }
}

/// `c_0^j` about `y` for stationary-in-time use: a plain-mode jet of degree `degree`.
pub fn compute_c0(pc: &ProblemCoefficients, y: &[f64], j: usize, degree: u32) -> Result<TimeJet> {
    let cfg = ExpansionConfig::new(0, degree, WarpParams::plain());
    Recursion::new(pc, y, &cfg)?.c0(j)
}
