//! Gauss rules shared by the solvers and the kernel diagnostics.

use std::num::NonZeroUsize;

use gauss_quad::{GaussHermite, GaussLegendre};

use crate::error::{Error, Result};

/// Tensor Gauss–Hermite rule for `π^{−n/2} ∫ e^{−|z|²} g(z) dz`; weights sum to one.
#[derive(Clone, Debug)]
pub struct HermiteRule {
    pub dim: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl HermiteRule {
    /// Tensor rule with `order` nodes per axis; nodes whose normalized weight falls below
    /// `prune` are dropped.
    pub fn new(dim: usize, order: usize, prune: f64) -> Result<Self> {
        let order = NonZeroUsize::new(order).ok_or_else(|| Error::Parameter("quadrature order must be >= 1".into()))?;
        if dim == 0 {
            return Err(Error::Parameter("dimension must be >= 1".into()));
        }
        let rule = GaussHermite::new(order);
        let scale = std::f64::consts::PI.sqrt().recip();
        let axis: Vec<(f64, f64)> = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(z, w)| (z, w * scale))
            .collect();
        let mut nodes = vec![Vec::with_capacity(dim)];
        let mut weights = vec![1.0];
        for _ in 0..dim {
            let mut nn = Vec::with_capacity(nodes.len() * axis.len());
            let mut ww = Vec::with_capacity(nodes.len() * axis.len());
            for (p, w) in nodes.iter().zip(&weights) {
                for &(z, v) in &axis {
                    let mut q = p.clone();
                    q.push(z);
                    nn.push(q);
                    ww.push(w * v);
                }
            }
            nodes = nn;
            weights = ww;
        }
        let wmax = weights.iter().cloned().fold(0.0, f64::max);
        let keep: Vec<bool> = weights.iter().map(|&w| w >= prune * wmax).collect();
        let nodes = nodes
            .into_iter()
            .zip(&keep)
            .filter_map(|(n, &k)| k.then_some(n))
            .collect();
        let weights = weights
            .into_iter()
            .zip(&keep)
            .filter_map(|(w, &k)| k.then_some(w))
            .collect();
        Ok(HermiteRule { dim, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Gauss–Legendre rule on `[−1, 1]`.
#[derive(Clone, Debug)]
pub struct LegendreRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LegendreRule {
    pub fn new(order: usize) -> Result<Self> {
        let order = NonZeroUsize::new(order).ok_or_else(|| Error::Parameter("quadrature order must be >= 1".into()))?;
        let rule = GaussLegendre::new(order);
        let (nodes, weights) = rule.as_node_weight_pairs().iter().cloned().unzip();
        Ok(LegendreRule { nodes, weights })
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (m + h * x, h * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// `∫_a^b f` over `panels` equal sub-intervals.
    pub fn composite(&self, a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|i| self.integrate(a + i as f64 * h, a + (i + 1) as f64 * h, &f))
            .sum()
    }
}
