use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest order whose factorial is representable as a finite `f64`.
pub const MAX_FACTORIAL_ORDER: u32 = 170;

/// Exponent tuple `γ = (γ_1, …, γ_n)` indexing monomials `Δx^γ` and partial derivatives.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Parameter("multi-index must have dimension >= 1".into()));
        }
        Ok(MultiIndex(entries))
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// The unit index `1_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `|γ| = Σ γ_i`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `γ! = Π γ_i!`, rejected once `|γ|` exceeds [`MAX_FACTORIAL_ORDER`].
    pub fn factorial(&self) -> Result<f64> {
        if self.order() > MAX_FACTORIAL_ORDER {
            return Err(Error::Parameter(format!(
                "factorial of multi-index with order {} overflows f64",
                self.order()
            )));
        }
        Ok(self.0.iter().map(|&g| factorial(g)).product())
    }

    /// `γ + 1_i`.
    pub fn raised(&self, i: usize) -> Self {
        let mut e = self.0.clone();
        e[i] += 1;
        MultiIndex(e)
    }

    /// `γ − 1_i`, or `None` when `γ_i = 0`.
    pub fn lowered(&self, i: usize) -> Option<Self> {
        if self.0[i] == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[i] -= 1;
        Some(MultiIndex(e))
    }

    pub fn add(&self, other: &Self) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `δ ≤ γ`.
    pub fn dominated_by(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `Π x_i^{γ_i}`.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&g, &xi)| xi.powi(g as i32)).product()
    }

    /// All `δ` with `0 ≤ δ ≤ γ` componentwise, in lexicographic order.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![Vec::with_capacity(self.dim())];
        for &g in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=g).map(move |d| {
                        let mut p = prefix.clone();
                        p.push(d);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(MultiIndex).collect()
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub fn factorial(m: u32) -> f64 {
    (1..=m).map(f64::from).product()
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Every multi-index of total order `d` in dimension `dim`, lexicographically descending
/// (so `(d,0,…)` comes first).
pub(crate) fn indices_of_order(dim: usize, d: u32) -> Vec<MultiIndex> {
    fn rec(dim: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() == dim - 1 {
            prefix.push(d);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in (0..=d).rev() {
            prefix.push(first);
            rec(dim, d - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, d, &mut Vec::with_capacity(dim), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_and_factorial() {
        let g = MultiIndex::new(vec![2, 0, 3]).unwrap();
        assert_eq!(g.order(), 5);
        assert_eq!(g.factorial().unwrap(), 12.0);
    }

    #[test]
    fn factorial_overflow_rejected() {
        let g = MultiIndex::new(vec![100, 71]).unwrap();
        assert!(g.factorial().is_err());
        let ok = MultiIndex::new(vec![100, 70]).unwrap();
        assert!(ok.factorial().unwrap().is_finite());
    }

    #[test]
    fn empty_rejected() {
        assert!(MultiIndex::new(vec![]).is_err());
    }

    #[test]
    fn graded_enumeration_counts() {
        // C(d + n - 1, n - 1) indices of order d.
        assert_eq!(indices_of_order(3, 4).len(), 15);
        assert_eq!(indices_of_order(1, 7).len(), 1);
        let two = indices_of_order(2, 2);
        assert_eq!(two[0].entries(), &[2, 0]);
        assert_eq!(two[2].entries(), &[0, 2]);
    }

    #[test]
    fn raise_lower() {
        let g = MultiIndex::new(vec![1, 0]).unwrap();
        assert_eq!(g.raised(1).entries(), &[1, 1]);
        assert!(g.lowered(1).is_none());
        assert_eq!(g.lowered(0).unwrap(), MultiIndex::zero(2));
    }

    #[test]
    fn sub_index_count() {
        let g = MultiIndex::new(vec![2, 1]).unwrap();
        assert_eq!(g.sub_indices().len(), 6);
    }
}
