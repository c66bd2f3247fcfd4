use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::taylor::TaylorPoly;

/// Which time variable a jet is expanded in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeVar {
    /// Physical time.
    T,
    /// Rescaled or warped time.
    Tau,
}

/// Truncated time series `Σ_l P_l(x) s^l` with Taylor-polynomial coefficients.
///
/// Products are truncated at `cap`; all terms share basis and center.
#[derive(Clone, Debug)]
pub struct TimeJet {
    var: TimeVar,
    cap: usize,
    terms: Vec<TaylorPoly>,
}

impl TimeJet {
    /// Jet with a single time-independent term.
    pub fn from_poly(var: TimeVar, cap: usize, p: TaylorPoly) -> Self {
        TimeJet {
            var,
            cap,
            terms: vec![p],
        }
    }

    pub fn from_terms(var: TimeVar, cap: usize, terms: Vec<TaylorPoly>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::Parameter("time jet needs at least one term".into()));
        };
        for t in &terms[1..] {
            first.check_compatible(t)?;
        }
        let mut jet = TimeJet { var, cap, terms };
        let truncated = jet.terms.len() > cap + 1 && jet.terms[cap + 1..].iter().any(|t| !t.is_zero());
        jet.terms.truncate(cap + 1);
        if truncated {
            jet.terms[0].mark_truncated();
        }
        jet.trim();
        Ok(jet)
    }

    pub fn zero_like(&self) -> Self {
        TimeJet::from_poly(self.var, self.cap, self.terms[0].zero_like())
    }

    pub fn var(&self) -> TimeVar {
        self.var
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Highest retained time power.
    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn terms(&self) -> &[TaylorPoly] {
        &self.terms
    }

    /// Coefficient of `s^l` (zero beyond the stored order).
    pub fn term(&self, l: usize) -> TaylorPoly {
        self.terms.get(l).cloned().unwrap_or_else(|| self.terms[0].zero_like())
    }

    pub fn truncated(&self) -> bool {
        self.terms.iter().any(TaylorPoly::truncated)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(TaylorPoly::is_zero)
    }

    fn trim(&mut self) {
        while self.terms.len() > 1 && self.terms.last().is_some_and(TaylorPoly::is_zero) {
            let last = self.terms.pop().unwrap();
            if last.truncated() {
                self.terms[0].mark_truncated();
            }
        }
    }

    fn check(&self, other: &TimeJet) -> Result<()> {
        if self.var != other.var {
            return Err(Error::Structural(format!(
                "time variable mismatch: {:?} vs {:?}",
                self.var, other.var
            )));
        }
        self.terms[0].check_compatible(&other.terms[0])
    }

    pub fn add(&self, other: &TimeJet) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    /// `self += factor · other`.
    pub fn axpy(&mut self, factor: f64, other: &TimeJet) -> Result<()> {
        self.check(other)?;
        let zero = self.terms[0].zero_like();
        while self.terms.len() < other.terms.len().min(self.cap + 1) {
            self.terms.push(zero.clone());
        }
        for (l, t) in other.terms.iter().enumerate() {
            if l > self.cap {
                if !t.is_zero() {
                    self.terms[0].mark_truncated();
                }
                continue;
            }
            self.terms[l].axpy(factor, t)?;
        }
        self.trim();
        Ok(())
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            *t = t.scale(factor);
        }
        out.trim();
        out
    }

    /// Cauchy product in time, truncated at `cap`; spatial products truncated at the degree cap.
    pub fn mul(&self, other: &TimeJet) -> Result<Self> {
        self.check(other)?;
        let len = (self.terms.len() + other.terms.len() - 1).min(self.cap + 1);
        let mut terms = vec![self.terms[0].zero_like(); len];
        let mut dropped = false;
        for (i, a) in self.terms.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.terms.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                if i + j >= len {
                    dropped = true;
                    continue;
                }
                let prod = a.mul(b)?;
                terms[i + j].axpy(1.0, &prod)?;
            }
        }
        if dropped {
            terms[0].mark_truncated();
        }
        let mut out = TimeJet {
            var: self.var,
            cap: self.cap,
            terms,
        };
        out.trim();
        Ok(out)
    }

    /// Multiplies every term by a scalar series `Σ_m a_m s^m`.
    pub fn mul_series(&self, series: &[f64]) -> Self {
        let len = (self.terms.len() + series.len().max(1) - 1).min(self.cap + 1);
        let mut terms = vec![self.terms[0].zero_like(); len];
        for (i, a) in self.terms.iter().enumerate() {
            for (m, &s) in series.iter().enumerate() {
                if s == 0.0 {
                    continue;
                }
                if i + m >= len {
                    if !a.is_zero() {
                        terms[0].mark_truncated();
                    }
                    continue;
                }
                terms[i + m].axpy(s, a).expect("shared basis");
            }
        }
        let mut out = TimeJet {
            var: self.var,
            cap: self.cap,
            terms,
        };
        out.trim();
        out
    }

    /// Applies a spatial operator to each time term.
    pub fn map_terms(&self, f: impl Fn(&TaylorPoly) -> Result<TaylorPoly>) -> Result<Self> {
        let terms = self.terms.iter().map(f).collect::<Result<Vec<_>>>()?;
        let mut out = TimeJet {
            var: self.var,
            cap: self.cap,
            terms,
        };
        out.trim();
        Ok(out)
    }

    pub fn partial(&self, i: usize) -> Result<Self> {
        self.map_terms(|p| p.partial(i))
    }

    pub fn laplacian(&self) -> Self {
        self.map_terms(|p| Ok(p.laplacian())).expect("infallible")
    }

    /// `∂/∂s`: term `l` becomes `l · P_l` at order `l − 1`.
    pub fn time_derivative(&self) -> Self {
        if self.terms.len() == 1 {
            return self.zero_like();
        }
        let terms = self.terms[1..]
            .iter()
            .enumerate()
            .map(|(l, p)| p.scale((l + 1) as f64))
            .collect();
        let mut out = TimeJet {
            var: self.var,
            cap: self.cap,
            terms,
        };
        out.trim();
        out
    }

    /// `Σ_l P_l(x) s^l` at spatial offset `Δx`.
    pub fn eval_offset(&self, dx: &[f64], s: f64) -> f64 {
        self.terms.iter().rev().fold(0.0, |acc, p| acc * s + p.eval_offset(dx))
    }

    pub fn eval(&self, x: &[f64], s: f64) -> f64 {
        let dx: Vec<f64> = x.iter().zip(self.terms[0].center()).map(|(a, b)| a - b).collect();
        self.eval_offset(&dx, s)
    }

    /// Time polynomial obtained by evaluating each term at `Δx`.
    pub fn time_series_at(&self, dx: &[f64]) -> Vec<f64> {
        self.terms.iter().map(|p| p.eval_offset(dx)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{MonomialBasis, MultiIndex};

    fn poly(c: &[f64]) -> TaylorPoly {
        let basis = MonomialBasis::new(1, 6).unwrap();
        TaylorPoly::from_terms(
            &basis,
            &[0.0],
            c.iter()
                .enumerate()
                .map(|(i, &v)| (MultiIndex::new(vec![i as u32]).unwrap(), v)),
        )
        .unwrap()
    }

    #[test]
    fn time_derivative_lowers_order() {
        let j = TimeJet::from_terms(TimeVar::T, 4, vec![poly(&[1.0]), poly(&[0.0, 2.0]), poly(&[3.0])]).unwrap();
        assert_eq!(j.order(), 2);
        let d = j.time_derivative();
        assert_eq!(d.order(), 1);
        assert_eq!(d.terms()[0].coeffs()[1], 2.0);
        assert_eq!(d.terms()[1].coeffs()[0], 6.0);
    }

    #[test]
    fn product_truncates_at_cap() {
        let j = TimeJet::from_terms(TimeVar::T, 2, vec![poly(&[1.0]), poly(&[1.0])]).unwrap();
        let sq = j.mul(&j).unwrap();
        assert_eq!(sq.order(), 2);
        assert!(!sq.truncated());
        let cube = sq.mul(&j).unwrap();
        assert_eq!(cube.order(), 2);
        assert!(cube.truncated());
        assert_eq!(cube.terms()[2].coeffs()[0], 3.0);
    }

    #[test]
    fn evaluation_horner() {
        let j = TimeJet::from_terms(TimeVar::Tau, 3, vec![poly(&[1.0, 1.0]), poly(&[2.0])]).unwrap();
        assert_eq!(j.eval(&[2.0], 0.5), 3.0 + 1.0);
    }

    #[test]
    fn mismatched_variable_rejected() {
        let a = TimeJet::from_poly(TimeVar::T, 2, poly(&[1.0]));
        let b = TimeJet::from_poly(TimeVar::Tau, 2, poly(&[1.0]));
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn series_multiplication() {
        let j = TimeJet::from_poly(TimeVar::Tau, 3, poly(&[2.0]));
        let m = j.mul_series(&[1.0, 0.5, 1.0 / 3.0, 0.25, 0.2]);
        assert_eq!(m.order(), 3);
        assert_eq!(m.terms()[1].coeffs()[0], 1.0);
        assert!(m.truncated());
    }
}
