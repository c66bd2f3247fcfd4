use crate::error::{Error, Result};

/// Square band matrix with `kl` sub- and `ku` super-diagonals, factored without pivoting.
#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row-major band storage: row `i` holds columns `i − kl ..= i + ku`.
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        BandMatrix {
            n,
            kl,
            ku,
            data: vec![0.0; n * (kl + ku + 1)],
        }
    }

    pub fn identity(n: usize, kl: usize, ku: usize) -> Self {
        let mut m = Self::zeros(n, kl, ku);
        for i in 0..n {
            m.add(i, i, 1.0);
        }
        m
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if j + self.kl < i || j > i + self.ku {
            return None;
        }
        Some(i * (self.kl + self.ku + 1) + (j + self.kl - i))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `v` at `(i, j)`; panics outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j).expect("entry outside band");
        self.data[s] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// `self ← a·self + b·I`-style combination: returns `I + factor · self`.
    pub fn shifted_identity(&self, factor: f64) -> Self {
        let mut m = self.clone();
        for v in &mut m.data {
            *v *= factor;
        }
        for i in 0..self.n {
            m.add(i, i, 1.0);
        }
        m
    }

    /// Solves `self · x = rhs` by band Gaussian elimination without pivoting.
    pub fn solve(mut self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let mut x = rhs.to_vec();
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        for k in 0..n {
            let piv = self.get(k, k);
            if piv.abs() <= 1e-14 * scale {
                return Err(Error::Conditioning(format!("zero pivot at row {k}")));
            }
            let last = (k + self.kl).min(n - 1);
            let right = (k + self.ku).min(n - 1);
            for i in k + 1..=last {
                let f = self.get(i, k) / piv;
                if f == 0.0 {
                    continue;
                }
                for j in k..=right {
                    let v = self.get(k, j);
                    if let Some(s) = self.slot(i, j) {
                        self.data[s] -= f * v;
                    }
                }
                x[i] -= f * x[k];
            }
        }
        for k in (0..n).rev() {
            let right = (k + self.ku).min(n - 1);
            let mut s = x[k];
            for (j, xj) in x.iter().enumerate().take(right + 1).skip(k + 1) {
                s -= self.get(k, j) * xj;
            }
            x[k] = s / self.get(k, k);
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solve() {
        let n = 50;
        let mut m = BandMatrix::zeros(n, 1, 1);
        for i in 0..n {
            m.add(i, i, 4.0);
            if i > 0 {
                m.add(i, i - 1, -1.0);
            }
            if i + 1 < n {
                m.add(i, i + 1, -1.5);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = m.mul_vec(&x);
        let y = m.solve(&b).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn singular_detected() {
        let m = BandMatrix::zeros(3, 1, 1);
        assert!(matches!(m.solve(&[1.0, 1.0, 1.0]), Err(Error::Conditioning(_))));
    }
}
