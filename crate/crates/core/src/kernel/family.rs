use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::Mutex;

use crate::error::{Error, Result};
use crate::quadrature::HermiteRule;
use crate::recursion::{expand, ExpansionCoeffs, ExpansionConfig, ProblemCoefficients};

use super::eval::{eval_kernel, KernelValue};

#[derive(Clone, PartialEq, Eq, Hash)]
struct Key {
    center: Vec<u64>,
    origin: u64,
}

/// Expansions of one problem about arbitrary centers, built on demand and cached.
///
/// The cache is safe for concurrent use; entries are deterministic functions of the key,
/// so results do not depend on evaluation order.
pub struct KernelFamily {
    pc: ProblemCoefficients,
    cfg: ExpansionConfig,
    stationary: bool,
    capacity: usize,
    cache: Mutex<HashMap<Key, Arc<ExpansionCoeffs>>>,
}

impl KernelFamily {
    pub fn new(pc: ProblemCoefficients, cfg: ExpansionConfig) -> Result<Self> {
        cfg.warp.validate()?;
        let mut cfg = cfg.with_shared_basis(pc.dim())?;
        cfg.sample_diagnostics = false;
        Ok(KernelFamily {
            stationary: !pc.is_time_dependent(),
            pc,
            cfg,
            capacity: 100_000,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn coefficients(&self) -> &ProblemCoefficients {
        &self.pc
    }

    pub fn config(&self) -> &ExpansionConfig {
        &self.cfg
    }

    pub fn is_stationary(&self) -> bool {
        self.stationary
    }

    pub fn cached(&self) -> usize {
        self.cache.lock().len()
    }

    /// Expansion about `y` for kernels starting at physical time `origin`.
    pub fn expansion(&self, y: &[f64], origin: f64) -> Result<Arc<ExpansionCoeffs>> {
        let origin = if self.stationary { 0.0 } else { origin };
        let key = Key {
            center: y.iter().map(|v| v.to_bits()).collect(),
            origin: origin.to_bits(),
        };
        if let Some(e) = self.cache.lock().get(&key) {
            return Ok(e.clone());
        }
        let cfg = self.cfg.clone().with_time_origin(origin);
        let e = Arc::new(expand(&self.pc, y, &cfg)?);
        let mut cache = self.cache.lock();
        if cache.len() >= self.capacity {
            cache.clear();
        }
        Ok(cache.entry(key).or_insert(e).clone())
    }

    /// `p_j(t, x; s, y)`.
    pub fn kernel(&self, t: f64, x: &[f64], s: f64, y: &[f64], j: usize) -> Result<KernelValue> {
        let e = self.expansion(y, s)?;
        eval_kernel(&e, t - s, x, y, j)
    }

    /// `∫ p_j(t, x; s, y) g(y) dy` and `∫ ∇_x p_j g dy` by Gauss–Hermite nodes
    /// `y = x + 2√(t−s) z`; the Gaussian factor is absorbed into the weights.
    #[allow(clippy::too_many_arguments)]
    pub fn convolve(
        &self,
        t: f64,
        s: f64,
        x: &[f64],
        j: usize,
        rule: &HermiteRule,
        g: impl Fn(&[f64]) -> f64,
        with_gradient: bool,
    ) -> Result<(f64, Vec<f64>)> {
        let tau = t - s;
        if !(tau > 0.0) {
            return Err(Error::Parameter("convolution needs t > s".into()));
        }
        if rule.dim != x.len() {
            return Err(Error::Structural("quadrature dimension mismatch".into()));
        }
        let scale = 2.0 * tau.sqrt();
        let mut value = 0.0;
        let mut grad = vec![0.0; x.len()];
        let mut y = vec![0.0; x.len()];
        for (z, &w) in rule.nodes.iter().zip(&rule.weights) {
            for d in 0..x.len() {
                y[d] = x[d] + scale * z[d];
            }
            let gy = g(&y);
            if gy == 0.0 {
                continue;
            }
            let e = self.expansion(&y, s)?;
            let c = e.correction(j, tau, x);
            let f = w * c.w.exp() * gy;
            value += f;
            if with_gradient {
                for d in 0..x.len() {
                    // −Δx/2τ with Δx = −2√τ z.
                    grad[d] += f * (z[d] / tau.sqrt() + c.grad[d]);
                }
            }
        }
        Ok((value, grad))
    }
}

/// `∫ p_j(t, x, y) dy` by Gauss–Hermite quadrature with `order` nodes per axis.
pub fn normalization_check(family: &KernelFamily, t: f64, x: &[f64], j: usize, order: usize) -> Result<f64> {
    let rule = HermiteRule::new(x.len(), order, 1e-18)?;
    Ok(family.convolve(t, 0.0, x, j, &rule, |_| 1.0, false)?.0)
}
