//! Symmetric banded matrices and their Cholesky factorization.

/// Symmetric matrix storing the lower band `i - bw <= j <= i` row by row.
#[derive(Clone, Debug)]
pub(crate) struct BandedSym {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedSym {
    pub fn zeros(n: usize, bw: usize) -> Self {
        let bw = bw.min(n.saturating_sub(1));
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (j + self.bw - i)
    }

    /// Entry `(i, j)` with `j <= i`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i - j > self.bw {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// Adds `v` to the lower entry `(i, j)`, `j <= i`.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn fill_zero(&mut self) {
        self.data.fill(0.0);
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn add_diagonal(&mut self, v: f64) {
        for i in 0..self.n {
            self.add(i, i, v);
        }
    }

    /// `y = A x`.
    #[cfg(test)]
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            for j in lo..i {
                let a = self.get(i, j);
                y[i] += a * x[j];
                y[j] += a * x[i];
            }
            y[i] += self.get(i, i) * x[i];
        }
        y
    }

    /// Cholesky factor `L` (same band) or `None` if a pivot is not positive.
    pub fn cholesky(&self) -> Option<BandedCholesky> {
        let mut l = self.clone();
        let bw = self.bw;
        for i in 0..self.n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut s = l.get(i, j);
                let klo = lo.max(j.saturating_sub(bw));
                for k in klo..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                if i == j {
                    if !(s > 0.0) || !s.is_finite() {
                        return None;
                    }
                    let k = l.idx(i, i);
                    l.data[k] = s.sqrt();
                } else {
                    let k = l.idx(i, j);
                    l.data[k] = s / l.get(j, j);
                }
            }
        }
        Some(BandedCholesky { l })
    }
}

pub(crate) struct BandedCholesky {
    l: BandedSym,
}

impl BandedCholesky {
    /// Solves `L Lᵀ x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let l = &self.l;
        let (n, bw) = (l.n, l.bw);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(bw)..i {
                s -= l.get(i, k) * y[k];
            }
            y[i] = s / l.get(i, i);
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..(i + bw + 1).min(n) {
                s -= l.get(k, i) * y[k];
            }
            y[i] = s / l.get(i, i);
        }
        y
    }
}
