use crate::error::{Error, Result};

use super::MEMBERSHIP_TOL;

/// Shortest admissible interval length.
const MIN_INTERVAL: f64 = 1e-14;

/// Partition `-1 = μ_0 < μ_1 < … < μ_k = 1` of the slab direction cosine.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition1D {
    nodes: Vec<f64>,
}

impl Partition1D {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::invalid("a partition needs at least two nodes"));
        }
        if nodes[0] != -1.0 || *nodes.last().unwrap() != 1.0 {
            return Err(Error::invalid("partition must start at -1 and end at 1"));
        }
        for w in nodes.windows(2) {
            if !(w[1] - w[0] >= MIN_INTERVAL) {
                return Err(Error::invalid(format!(
                    "partition nodes must be strictly increasing (interval [{}, {}])",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { nodes })
    }

    /// Equidistant partition with `k` intervals.
    pub fn equidistant(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("equidistant partition needs k >= 1"));
        }
        let mut nodes: Vec<f64> = (0..=k)
            .map(|j| -1.0 + 2.0 * j as f64 / k as f64)
            .collect();
        nodes[k] = 1.0;
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of intervals `k`.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn interval(&self, j: usize) -> (f64, f64) {
        (self.nodes[j], self.nodes[j + 1])
    }

    pub fn width(&self, j: usize) -> f64 {
        self.nodes[j + 1] - self.nodes[j]
    }

    /// Closed-interval membership with the standard slack.
    pub fn contains(&self, j: usize, mu: f64) -> bool {
        let (a, b) = self.interval(j);
        mu >= a - MEMBERSHIP_TOL && mu <= b + MEMBERSHIP_TOL
    }

    /// Index of the closed interval containing `mu`; shared nodes resolve to
    /// the lower interval.
    pub fn locate(&self, mu: f64) -> Result<usize> {
        if !mu.is_finite() || mu.abs() > 1.0 + MEMBERSHIP_TOL {
            return Err(Error::OffDomain(format!("mu={mu}")));
        }
        let interior = &self.nodes[1..self.nodes.len() - 1];
        Ok(interior.partition_point(|&x| x < mu))
    }

    /// Subdivide every interval into `m` equal pieces, additionally splitting
    /// at the given interior breakpoints. Returns the sub-intervals together
    /// with the index of the parent interval.
    pub fn subdivide(&self, m: usize, breakpoints: &[f64]) -> Vec<(f64, f64, usize)> {
        let m = m.max(1);
        let mut out = Vec::with_capacity(self.intervals() * m);
        for j in 0..self.intervals() {
            let (a, b) = self.interval(j);
            let mut cuts: Vec<f64> = (0..=m)
                .map(|i| a + (b - a) * i as f64 / m as f64)
                .collect();
            cuts[m] = b;
            for &p in breakpoints {
                if p > a + MIN_INTERVAL && p < b - MIN_INTERVAL {
                    cuts.push(p);
                }
            }
            cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
            cuts.dedup_by(|x, y| (*x - *y).abs() < MIN_INTERVAL);
            for w in cuts.windows(2) {
                out.push((w[0], w[1], j));
            }
        }
        out
    }
}
