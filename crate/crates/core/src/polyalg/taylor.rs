use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::multi_index::{indices_of_order, MultiIndex};

/// Dense graded-lexicographic monomial basis `{Δx^γ : |γ| ≤ D}` in `n` variables.
///
/// Monomials are stored by ascending total degree, so the monomials of degree `≤ d`
/// always form a prefix of length `prefix_len(d)`. Product and shift tables are built once
/// and shared by every polynomial over the same basis.
pub struct MonomialBasis {
    dim: usize,
    degree: u32,
    indices: Vec<MultiIndex>,
    orders: Vec<u32>,
    lookup: HashMap<MultiIndex, usize>,
    prefix: Vec<usize>,
    raise: Vec<Vec<Option<usize>>>,
    products: Vec<Vec<usize>>,
}

impl MonomialBasis {
    pub fn new(dim: usize, degree: u32) -> Result<Arc<Self>> {
        if dim == 0 {
            return Err(Error::Parameter("dimension must be >= 1".into()));
        }
        let mut indices = Vec::new();
        let mut prefix = Vec::with_capacity(degree as usize + 1);
        for d in 0..=degree {
            indices.extend(indices_of_order(dim, d));
            prefix.push(indices.len());
        }
        let orders: Vec<u32> = indices.iter().map(MultiIndex::order).collect();
        let lookup: HashMap<MultiIndex, usize> = indices.iter().enumerate().map(|(p, g)| (g.clone(), p)).collect();
        let raise = indices
            .iter()
            .map(|g| (0..dim).map(|i| lookup.get(&g.raised(i)).copied()).collect())
            .collect();
        let products = indices
            .iter()
            .zip(&orders)
            .map(|(a, &oa)| {
                indices[..prefix[(degree - oa) as usize]]
                    .iter()
                    .map(|b| lookup[&a.add(b)])
                    .collect()
            })
            .collect();
        Ok(Arc::new(MonomialBasis {
            dim,
            degree,
            indices,
            orders,
            lookup,
            prefix,
            raise,
            products,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, g: &MultiIndex) -> Option<usize> {
        self.lookup.get(g).copied()
    }

    pub fn order_at(&self, p: usize) -> u32 {
        self.orders[p]
    }

    /// Number of monomials with total degree `≤ d`.
    pub fn prefix_len(&self, d: u32) -> usize {
        self.prefix[d.min(self.degree) as usize]
    }

    fn same_as(&self, other: &MonomialBasis) -> bool {
        self.dim == other.dim && self.degree == other.degree
    }
}

impl fmt::Debug for MonomialBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonomialBasis")
            .field("dim", &self.dim)
            .field("degree", &self.degree)
            .field("len", &self.indices.len())
            .finish()
    }
}

/// Truncated multivariate Taylor polynomial `Σ_{|γ|≤D} c_γ (x − y)^γ` about a center `y`.
#[derive(Clone)]
pub struct TaylorPoly {
    basis: Arc<MonomialBasis>,
    center: Arc<[f64]>,
    coeffs: Vec<f64>,
    truncated: bool,
}

impl TaylorPoly {
    pub fn zero(basis: &Arc<MonomialBasis>, center: &[f64]) -> Result<Self> {
        if center.len() != basis.dim() {
            return Err(Error::Structural(format!(
                "center has length {} but basis dimension is {}",
                center.len(),
                basis.dim()
            )));
        }
        Ok(TaylorPoly {
            basis: Arc::clone(basis),
            center: Arc::from(center),
            coeffs: vec![0.0; basis.len()],
            truncated: false,
        })
    }

    /// Zero polynomial sharing basis and center with `self`.
    pub fn zero_like(&self) -> Self {
        TaylorPoly {
            basis: Arc::clone(&self.basis),
            center: Arc::clone(&self.center),
            coeffs: vec![0.0; self.basis.len()],
            truncated: false,
        }
    }

    pub fn constant_like(&self, value: f64) -> Self {
        let mut p = self.zero_like();
        p.coeffs[0] = value;
        p
    }

    pub fn constant(basis: &Arc<MonomialBasis>, center: &[f64], value: f64) -> Result<Self> {
        let mut p = Self::zero(basis, center)?;
        p.coeffs[0] = value;
        Ok(p)
    }

    /// `Δx_i = x_i − y_i`.
    pub fn coordinate(basis: &Arc<MonomialBasis>, center: &[f64], i: usize) -> Result<Self> {
        if i >= basis.dim() {
            return Err(Error::Parameter(format!("coordinate {i} out of range")));
        }
        let mut p = Self::zero(basis, center)?;
        if basis.degree() >= 1 {
            let pos = basis.position(&MultiIndex::unit(basis.dim(), i)).unwrap();
            p.coeffs[pos] = 1.0;
        } else {
            p.truncated = true;
        }
        Ok(p)
    }

    /// Polynomial from coefficients in basis order.
    pub fn from_coeffs(basis: &Arc<MonomialBasis>, center: &[f64], coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::Structural(format!(
                "expected {} coefficients, got {}",
                basis.len(),
                coeffs.len()
            )));
        }
        let mut p = Self::zero(basis, center)?;
        p.coeffs = coeffs;
        Ok(p)
    }

    /// Builds a polynomial from `(γ, c_γ)` pairs; entries beyond the cap are dropped and flagged.
    pub fn from_terms(
        basis: &Arc<MonomialBasis>,
        center: &[f64],
        terms: impl IntoIterator<Item = (MultiIndex, f64)>,
    ) -> Result<Self> {
        let mut p = Self::zero(basis, center)?;
        for (g, c) in terms {
            if g.dim() != basis.dim() {
                return Err(Error::Structural("multi-index dimension mismatch".into()));
            }
            match basis.position(&g) {
                Some(pos) => p.coeffs[pos] += c,
                None if c != 0.0 => p.truncated = true,
                None => {}
            }
        }
        Ok(p)
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn degree_cap(&self) -> u32 {
        self.basis.degree()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// Coefficients in graded-lexicographic basis order.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, g: &MultiIndex) -> f64 {
        self.basis.position(g).map_or(0.0, |p| self.coeffs[p])
    }

    /// True once any operation producing this value discarded a nonzero term above the cap.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Nonzero `(γ, c_γ)` pairs in basis order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.basis
            .indices()
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, &c)| c != 0.0)
            .map(|(g, &c)| (g, c))
    }

    pub fn check_compatible(&self, other: &TaylorPoly) -> Result<()> {
        if !Arc::ptr_eq(&self.basis, &other.basis) && !self.basis.same_as(&other.basis) {
            return Err(Error::Structural(format!(
                "basis mismatch: (n={}, D={}) vs (n={}, D={})",
                self.dim(),
                self.degree_cap(),
                other.dim(),
                other.degree_cap()
            )));
        }
        if self.center != other.center {
            return Err(Error::Structural(format!(
                "center mismatch: {:?} vs {:?}",
                &self.center[..],
                &other.center[..]
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &TaylorPoly) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other, 1.0);
        Ok(out)
    }

    pub fn sub(&self, other: &TaylorPoly) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other, -1.0);
        Ok(out)
    }

    /// `self += factor · other`.
    pub fn axpy(&mut self, factor: f64, other: &TaylorPoly) -> Result<()> {
        self.check_compatible(other)?;
        self.add_assign_unchecked(other, factor);
        Ok(())
    }

    fn add_assign_unchecked(&mut self, other: &TaylorPoly, factor: f64) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += factor * b;
        }
        self.truncated |= other.truncated;
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= factor);
        out
    }

    /// Truncated product `c_γ = Σ_{ρ+α=γ} a_ρ b_α` for `|γ| ≤ D`.
    pub fn mul(&self, other: &TaylorPoly) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.zero_like();
        out.truncated = self.truncated || other.truncated;
        let cap = self.basis.degree();
        let mut other_top = None;
        for (q, &b) in other.coeffs.iter().enumerate().rev() {
            if b != 0.0 {
                other_top = Some(self.basis.order_at(q));
                break;
            }
        }
        let Some(other_top) = other_top else {
            return Ok(out);
        };
        for (p, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let table = &self.basis.products[p];
            for (q, &pos) in table.iter().enumerate() {
                let b = other.coeffs[q];
                if b != 0.0 {
                    out.coeffs[pos] += a * b;
                }
            }
            if self.basis.order_at(p) + other_top > cap {
                let cut = table.len();
                if other.coeffs[cut..].iter().any(|&b| b != 0.0) {
                    out.truncated = true;
                }
            }
        }
        Ok(out)
    }

    /// `∂/∂x_i`: coefficient `(γ_i + 1) c_{γ+1_i}` at index `γ`.
    pub fn partial(&self, i: usize) -> Result<Self> {
        if i >= self.dim() {
            return Err(Error::Parameter(format!(
                "partial derivative index {i} out of range for dimension {}",
                self.dim()
            )));
        }
        let mut out = self.zero_like();
        out.truncated = self.truncated;
        for (p, g) in self.basis.indices.iter().enumerate() {
            if let Some(up) = self.basis.raise[p][i] {
                out.coeffs[p] = f64::from(g.entries()[i] + 1) * self.coeffs[up];
            }
        }
        Ok(out)
    }

    /// `Σ_i ∂²/∂x_i²`.
    pub fn laplacian(&self) -> Self {
        let mut out = self.zero_like();
        out.truncated = self.truncated;
        for i in 0..self.dim() {
            for (p, g) in self.basis.indices.iter().enumerate() {
                let Some(up1) = self.basis.raise[p][i] else {
                    continue;
                };
                let Some(up2) = self.basis.raise[up1][i] else {
                    continue;
                };
                let gi = f64::from(g.entries()[i]);
                out.coeffs[p] += (gi + 2.0) * (gi + 1.0) * self.coeffs[up2];
            }
        }
        out
    }

    /// `Σ_i Δx_i ∂c/∂x_i`, i.e. each `c_γ` scaled by `|γ|` (Euler operator).
    pub fn euler(&self) -> Self {
        self.map_by_order(|order, c| f64::from(order) * c)
    }

    /// Applies `f(|γ|, c_γ)` to every coefficient.
    pub fn map_by_order(&self, f: impl Fn(u32, f64) -> f64) -> Self {
        let mut out = self.clone();
        for (p, c) in out.coeffs.iter_mut().enumerate() {
            *c = f(self.basis.order_at(p), *c);
        }
        out
    }

    /// Multiplies by `Δx_i`.
    pub fn mul_coordinate(&self, i: usize) -> Self {
        let mut out = self.zero_like();
        out.truncated = self.truncated;
        for (p, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            match self.basis.raise[p][i] {
                Some(up) => out.coeffs[up] += c,
                None => out.truncated = true,
            }
        }
        out
    }

    /// `Σ_γ c_γ (x − y)^γ`, summed in graded-lexicographic order.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let dx: Vec<f64> = x.iter().zip(self.center.iter()).map(|(a, b)| a - b).collect();
        self.eval_offset(&dx)
    }

    /// Evaluates at `Δx` directly.
    pub fn eval_offset(&self, dx: &[f64]) -> f64 {
        debug_assert_eq!(dx.len(), self.dim());
        if self.dim() == 1 {
            let d = dx[0];
            let mut pw = 1.0;
            let mut acc = 0.0;
            for &c in &self.coeffs {
                acc += c * pw;
                pw *= d;
            }
            return acc;
        }
        let powers = self.offset_powers(dx);
        let mut acc = 0.0;
        for (g, &c) in self.basis.indices.iter().zip(&self.coeffs) {
            if c == 0.0 {
                continue;
            }
            let m: f64 = g
                .entries()
                .iter()
                .enumerate()
                .map(|(i, &e)| powers[i][e as usize])
                .product();
            acc += c * m;
        }
        acc
    }

    fn offset_powers(&self, dx: &[f64]) -> Vec<Vec<f64>> {
        let d = self.basis.degree() as usize;
        dx.iter()
            .map(|&v| {
                let mut row = Vec::with_capacity(d + 1);
                let mut pw = 1.0;
                for _ in 0..=d {
                    row.push(pw);
                    pw *= v;
                }
                row
            })
            .collect()
    }

    /// Maximum coefficient difference against `other`.
    pub fn max_abs_diff(&self, other: &TaylorPoly) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub(crate) fn mark_truncated(&mut self) {
        self.truncated = true;
    }
}

impl fmt::Debug for TaylorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<_> = self.terms().map(|(g, c)| (g.clone(), c)).collect();
        f.debug_struct("TaylorPoly")
            .field("center", &&self.center[..])
            .field("degree_cap", &self.degree_cap())
            .field("terms", &terms)
            .field("truncated", &self.truncated)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec()).unwrap()
    }

    fn p1(coeffs: &[f64], center: f64, cap: u32) -> TaylorPoly {
        let basis = MonomialBasis::new(1, cap).unwrap();
        TaylorPoly::from_terms(
            &basis,
            &[center],
            coeffs.iter().enumerate().map(|(i, &c)| (idx(&[i as u32]), c)),
        )
        .unwrap()
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(MonomialBasis::new(0, 3).is_err());
    }

    #[test]
    fn add_cancellation_and_identity() {
        let a = p1(&[1.0, 1.0], 0.0, 4);
        let b = p1(&[0.0, -1.0], 0.0, 4);
        let s = a.add(&b).unwrap();
        assert_eq!(s.coeffs()[..2], [1.0, 0.0]);
        let z = a.zero_like();
        assert_eq!(a.add(&z).unwrap().coeffs(), a.coeffs());
    }

    #[test]
    fn add_two_coordinates_evaluates_to_two() {
        let basis = MonomialBasis::new(2, 3).unwrap();
        let x1 = TaylorPoly::coordinate(&basis, &[0.0, 0.0], 0).unwrap();
        let x2 = TaylorPoly::coordinate(&basis, &[0.0, 0.0], 1).unwrap();
        assert_eq!(x1.add(&x2).unwrap().eval(&[1.0, 1.0]), 2.0);
    }

    #[test]
    fn mismatched_center_is_structural_error() {
        let a = p1(&[1.0], 0.0, 2);
        let b = p1(&[1.0], 0.5, 2);
        assert!(matches!(a.add(&b), Err(Error::Structural(_))));
        let c = p1(&[1.0], 0.0, 3);
        assert!(matches!(a.mul(&c), Err(Error::Structural(_))));
    }

    #[test]
    fn product_difference_of_squares() {
        let a = p1(&[1.0, 1.0], 0.0, 4);
        let b = p1(&[1.0, -1.0], 0.0, 4);
        let m = a.mul(&b).unwrap();
        assert_eq!(m.coeffs(), &[1.0, 0.0, -1.0, 0.0, 0.0]);
        assert!(!m.truncated());
        assert!(a.mul(&a.zero_like()).unwrap().is_zero());
    }

    #[test]
    fn product_square_of_sum_matches_brute_force() {
        let basis = MonomialBasis::new(2, 4).unwrap();
        let x1 = TaylorPoly::coordinate(&basis, &[0.0, 0.0], 0).unwrap();
        let x2 = TaylorPoly::coordinate(&basis, &[0.0, 0.0], 1).unwrap();
        let s = x1.add(&x2).unwrap();
        let sq = s.mul(&s).unwrap();
        // Brute force convolution over all index pairs.
        let mut expect: HashMap<MultiIndex, f64> = HashMap::new();
        for (ga, ca) in s.terms() {
            for (gb, cb) in s.terms() {
                *expect.entry(ga.add(gb)).or_default() += ca * cb;
            }
        }
        assert_eq!(expect[&idx(&[2, 0])], 1.0);
        assert_eq!(expect[&idx(&[1, 1])], 2.0);
        for (g, c) in expect {
            assert_eq!(sq.coeff(&g), c);
        }
        assert_eq!(sq.terms().count(), 3);
    }

    #[test]
    fn truncation_flag_raised() {
        let a = p1(&[0.0, 0.0, 1.0], 0.0, 3);
        let m = a.mul(&a).unwrap();
        assert!(m.truncated());
        assert!(m.is_zero());
        let lin = p1(&[0.0, 1.0], 0.0, 3);
        assert!(!lin.mul(&lin).unwrap().truncated());
    }

    #[test]
    fn partial_derivatives() {
        let sq = p1(&[0.0, 0.0, 1.0], 0.0, 4);
        assert_eq!(sq.partial(0).unwrap().coeffs()[..3], [0.0, 2.0, 0.0]);
        assert!(p1(&[3.0], 0.0, 4).partial(0).unwrap().is_zero());
        assert!(sq.partial(1).is_err());

        // d/dx1 (dx1^2 dx2) = 2 dx1 dx2.
        let basis = MonomialBasis::new(2, 4).unwrap();
        let p = TaylorPoly::from_terms(&basis, &[0.0, 0.0], [(idx(&[2, 1]), 1.0)]).unwrap();
        let d = p.partial(0).unwrap();
        assert_eq!(d.coeff(&idx(&[1, 1])), 2.0);
        assert_eq!(d.terms().count(), 1);
    }

    #[test]
    fn laplacians() {
        assert_eq!(p1(&[0.0, 0.0, 1.0], 0.0, 4).laplacian().coeffs()[0], 2.0);
        assert!(p1(&[4.0, -3.0], 0.0, 4).laplacian().is_zero());
        let basis = MonomialBasis::new(2, 5).unwrap();
        let p = TaylorPoly::from_terms(&basis, &[0.0, 0.0], [(idx(&[2, 0]), 1.0), (idx(&[0, 4]), 1.0)]).unwrap();
        let lap = p.laplacian();
        let via_partials = p
            .partial(0)
            .unwrap()
            .partial(0)
            .unwrap()
            .add(&p.partial(1).unwrap().partial(1).unwrap())
            .unwrap();
        assert_eq!(lap.coeffs(), via_partials.coeffs());
        assert_eq!(lap.coeff(&idx(&[0, 0])), 2.0);
        assert_eq!(lap.coeff(&idx(&[0, 2])), 12.0);
        assert_eq!(lap.terms().count(), 2);
    }

    #[test]
    fn evaluation() {
        let p = p1(&[1.0, 1.0], 0.0, 3);
        assert_eq!(p.eval(&[2.0]), 3.0);
        let q = p1(&[7.5, 2.0, -1.0], 0.3, 3);
        assert_eq!(q.eval(&[0.3]), 7.5);
        let basis = MonomialBasis::new(2, 3).unwrap();
        let m = TaylorPoly::from_terms(&basis, &[1.0, 1.0], [(idx(&[1, 1]), 1.0)]).unwrap();
        assert_eq!(m.eval(&[4.0, 0.0]), -3.0);
    }

    #[test]
    fn euler_operator_scales_by_order() {
        let basis = MonomialBasis::new(2, 3).unwrap();
        let p = TaylorPoly::from_terms(
            &basis,
            &[0.0, 0.0],
            [(idx(&[0, 0]), 1.0), (idx(&[1, 1]), 2.0), (idx(&[0, 3]), 1.0)],
        )
        .unwrap();
        let e = p.euler();
        assert_eq!(e.coeff(&idx(&[0, 0])), 0.0);
        assert_eq!(e.coeff(&idx(&[1, 1])), 4.0);
        assert_eq!(e.coeff(&idx(&[0, 3])), 3.0);
    }
}
