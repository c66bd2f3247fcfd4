//! Coefficient functions that admit exact Taylor expansion: polynomials and finite
//! Fourier (sine) series in space, optionally polynomial in time.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::jet::{TimeJet, TimeVar};
use super::multi_index::{binomial, factorial, indices_of_order, MultiIndex};
use super::taylor::{MonomialBasis, TaylorPoly};

/// `coeff · x^exponents` in absolute coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

/// `amplitude · sin(wave · x + phase)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub amplitude: f64,
    pub wave: Vec<f64>,
    pub phase: f64,
}

/// Sum of polynomial and sine terms in `n` spatial variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialFn {
    dim: usize,
    #[serde(default)]
    poly: Vec<PolyTerm>,
    #[serde(default)]
    fourier: Vec<FourierTerm>,
}

/// Result of [`SpatialFn::taylorize`].
#[derive(Clone, Debug)]
pub struct Taylorized {
    pub poly: TaylorPoly,
    /// Upper bound on `|f(x) − poly(x)|` for `|x − y|_∞ ≤ radius` (Euclidean for sine terms).
    pub remainder_bound: f64,
}

impl SpatialFn {
    pub fn zero(dim: usize) -> Self {
        SpatialFn {
            dim,
            poly: Vec::new(),
            fourier: Vec::new(),
        }
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        Self::polynomial(
            dim,
            vec![PolyTerm {
                exponents: vec![0; dim],
                coeff: value,
            }],
        )
        .expect("well-formed constant")
    }

    pub fn polynomial(dim: usize, terms: Vec<PolyTerm>) -> Result<Self> {
        let f = SpatialFn {
            dim,
            poly: terms,
            fourier: Vec::new(),
        };
        f.validate()?;
        Ok(f)
    }

    pub fn fourier(dim: usize, terms: Vec<FourierTerm>) -> Result<Self> {
        let f = SpatialFn {
            dim,
            poly: Vec::new(),
            fourier: terms,
        };
        f.validate()?;
        Ok(f)
    }

    /// `amplitude · sin(x_axis)` style single sine in one coordinate.
    pub fn sine(dim: usize, amplitude: f64, axis: usize, wavenumber: f64, phase: f64) -> Self {
        let mut wave = vec![0.0; dim];
        wave[axis] = wavenumber;
        Self::fourier(dim, vec![FourierTerm { amplitude, wave, phase }]).expect("well-formed sine")
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Parameter("coefficient dimension must be >= 1".into()));
        }
        for t in &self.poly {
            if t.exponents.len() != self.dim {
                return Err(Error::Structural(format!(
                    "polynomial term has {} exponents, expected {}",
                    t.exponents.len(),
                    self.dim
                )));
            }
            if !t.coeff.is_finite() {
                return Err(Error::Parameter("non-finite polynomial coefficient".into()));
            }
        }
        for t in &self.fourier {
            if t.wave.len() != self.dim {
                return Err(Error::Structural(format!(
                    "fourier term has {} wave numbers, expected {}",
                    t.wave.len(),
                    self.dim
                )));
            }
            if !(t.amplitude.is_finite() && t.phase.is_finite() && t.wave.iter().all(|w| w.is_finite())) {
                return Err(Error::Parameter("non-finite fourier term".into()));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn poly_terms(&self) -> &[PolyTerm] {
        &self.poly
    }

    pub fn fourier_terms(&self) -> &[FourierTerm] {
        &self.fourier
    }

    pub fn is_zero(&self) -> bool {
        self.poly.iter().all(|t| t.coeff == 0.0) && self.fourier.iter().all(|t| t.amplitude == 0.0)
    }

    /// Highest polynomial degree present (sine terms are not counted).
    pub fn poly_degree(&self) -> u32 {
        self.poly
            .iter()
            .filter(|t| t.coeff != 0.0)
            .map(|t| t.exponents.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.poly.iter_mut().for_each(|t| t.coeff *= factor);
        out.fourier.iter_mut().for_each(|t| t.amplitude *= factor);
        out
    }

    pub fn plus(&self, other: &SpatialFn) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Structural("dimension mismatch in coefficient sum".into()));
        }
        let mut out = self.clone();
        out.poly.extend(other.poly.iter().cloned());
        out.fourier.extend(other.fourier.iter().cloned());
        Ok(out)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let p: f64 = self
            .poly
            .iter()
            .map(|t| {
                t.coeff
                    * t.exponents
                        .iter()
                        .zip(x)
                        .map(|(&e, &xi)| xi.powi(e as i32))
                        .product::<f64>()
            })
            .sum();
        let f: f64 = self
            .fourier
            .iter()
            .map(|t| t.amplitude * (dot(&t.wave, x) + t.phase).sin())
            .sum();
        p + f
    }

    /// Exact mixed partial derivative `∂^α f(x)`.
    pub fn derivative(&self, alpha: &MultiIndex, x: &[f64]) -> f64 {
        let a = alpha.entries();
        let p: f64 = self
            .poly
            .iter()
            .map(|t| {
                let mut v = t.coeff;
                for ((&e, &ai), &xi) in t.exponents.iter().zip(a).zip(x) {
                    if ai > e {
                        return 0.0;
                    }
                    let falling: f64 = (0..ai).map(|m| f64::from(e - m)).product();
                    v *= falling * xi.powi((e - ai) as i32);
                }
                v
            })
            .sum();
        let order = alpha.order();
        let f: f64 = self
            .fourier
            .iter()
            .map(|t| {
                let kpow: f64 = t.wave.iter().zip(a).map(|(&k, &ai)| k.powi(ai as i32)).product();
                let theta = dot(&t.wave, x) + t.phase + f64::from(order) * std::f64::consts::FRAC_PI_2;
                t.amplitude * kpow * theta.sin()
            })
            .sum();
        p + f
    }

    /// Taylor expansion about `center` truncated at the basis degree, with a remainder bound
    /// valid for evaluation points within `radius` of the center.
    pub fn taylorize(&self, basis: &Arc<MonomialBasis>, center: &[f64], radius: f64) -> Result<Taylorized> {
        self.validate()?;
        if self.dim != basis.dim() || center.len() != self.dim {
            return Err(Error::Structural(format!(
                "coefficient of dimension {} expanded in basis of dimension {}",
                self.dim,
                basis.dim()
            )));
        }
        let cap = basis.degree();
        let mut poly = TaylorPoly::zero(basis, center)?;
        let mut remainder = 0.0;

        // Binomial re-centering: x^e = Π_i Σ_{δ_i} C(e_i, δ_i) y_i^{e_i − δ_i} Δx_i^{δ_i}.
        for t in &self.poly {
            if t.coeff == 0.0 {
                continue;
            }
            let e = MultiIndex::new(t.exponents.clone())?;
            for d in e.sub_indices() {
                let w: f64 = e
                    .entries()
                    .iter()
                    .zip(d.entries())
                    .zip(center)
                    .map(|((&ei, &di), &yi)| binomial(ei, di) * yi.powi((ei - di) as i32))
                    .product();
                let c = t.coeff * w;
                match basis.position(&d) {
                    Some(p) => poly.coeffs_mut()[p] += c,
                    None => {
                        if c != 0.0 {
                            poly.mark_truncated();
                        }
                        remainder += c.abs() * radius.powi(d.order() as i32);
                    }
                }
            }
        }

        // a sin(θ₀ + k·Δx) = Σ_m a sin(θ₀ + mπ/2) (k·Δx)^m / m!, and (k·Δx)^m / m! = Σ_{|δ|=m} k^δ Δx^δ / δ!.
        for t in &self.fourier {
            if t.amplitude == 0.0 {
                continue;
            }
            let theta0 = dot(&t.wave, center) + t.phase;
            for m in 0..=cap {
                let s = (theta0 + f64::from(m) * std::f64::consts::FRAC_PI_2).sin();
                for d in indices_of_order(self.dim, m) {
                    let kpow: f64 = t
                        .wave
                        .iter()
                        .zip(d.entries())
                        .map(|(&k, &di)| k.powi(di as i32))
                        .product();
                    if kpow == 0.0 {
                        continue;
                    }
                    let p = basis.position(&d).expect("within cap");
                    poly.coeffs_mut()[p] += t.amplitude * s * kpow / d.factorial()?;
                }
            }
            let knorm = t.wave.iter().map(|k| k * k).sum::<f64>().sqrt();
            let tail = t.amplitude.abs() * (knorm * radius).powi(cap as i32 + 1) / factorial(cap + 1);
            if tail > 0.0 {
                poly.mark_truncated();
            }
            remainder += tail;
        }

        Ok(Taylorized {
            poly,
            remainder_bound: remainder,
        })
    }
}

/// Space-time coefficient `Σ_l t^l f_l(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFn {
    time_terms: Vec<SpatialFn>,
}

impl CoefficientFn {
    pub fn stationary(f: SpatialFn) -> Self {
        CoefficientFn { time_terms: vec![f] }
    }

    pub fn time_polynomial(terms: Vec<SpatialFn>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::Parameter("time polynomial needs at least one term".into()));
        };
        let dim = first.dim();
        for t in &terms {
            if t.dim() != dim {
                return Err(Error::Structural("time terms disagree on dimension".into()));
            }
            t.validate()?;
        }
        Ok(CoefficientFn { time_terms: terms })
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        Self::stationary(SpatialFn::constant(dim, value))
    }

    pub fn dim(&self) -> usize {
        self.time_terms[0].dim()
    }

    pub fn time_terms(&self) -> &[SpatialFn] {
        &self.time_terms
    }

    pub fn is_time_dependent(&self) -> bool {
        self.time_terms[1..].iter().any(|f| !f.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.time_terms.iter().all(SpatialFn::is_zero)
    }

    pub fn eval(&self, t: f64, x: &[f64]) -> f64 {
        self.time_terms.iter().rev().fold(0.0, |acc, f| acc * t + f.eval(x))
    }

    pub fn spatial_derivative(&self, alpha: &MultiIndex, t: f64, x: &[f64]) -> f64 {
        self.time_terms
            .iter()
            .rev()
            .fold(0.0, |acc, f| acc * t + f.derivative(alpha, x))
    }

    /// `∂_t^m` at `(t, x)`.
    pub fn time_derivative(&self, m: u32, t: f64, x: &[f64]) -> f64 {
        self.time_terms
            .iter()
            .enumerate()
            .skip(m as usize)
            .map(|(l, f)| {
                let falling: f64 = (0..m).map(|j| (l as u32 - j) as f64).product();
                falling * t.powi(l as i32 - m as i32) * f.eval(x)
            })
            .sum()
    }

    /// Taylor expansion in space about `center` and composition in time with
    /// `t = Σ_m time_map[m] s^m`, as a jet in `s` truncated at `cap`.
    pub fn taylorize_jet(
        &self,
        basis: &Arc<MonomialBasis>,
        center: &[f64],
        radius: f64,
        var: TimeVar,
        cap: usize,
        time_map: &[f64],
    ) -> Result<TimeJet> {
        let polys = self
            .time_terms
            .iter()
            .map(|f| f.taylorize(basis, center, radius).map(|t| t.poly))
            .collect::<Result<Vec<_>>>()?;
        let zero = TaylorPoly::zero(basis, center)?;
        let mut out = TimeJet::from_poly(var, cap, zero.clone());
        let mut power = vec![1.0];
        for p in &polys {
            let term = TimeJet::from_poly(var, cap, p.clone()).mul_series(&power);
            out.axpy(1.0, &term)?;
            power = series_mul(&power, time_map, cap);
        }
        Ok(out)
    }
}

/// Truncated product of scalar power series.
pub fn series_mul(a: &[f64], b: &[f64], cap: usize) -> Vec<f64> {
    let len = (a.len() + b.len()).saturating_sub(1).min(cap + 1);
    let mut out = vec![0.0; len];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            if i + j < len {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
