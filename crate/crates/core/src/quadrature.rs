//! Composite Gauss–Lobatto rules on interval partitions and mapped
//! triangle rules on spherical triangulations.

use std::ops::Range;

use crate::basis::AngularBasis;
use crate::error::{Error, Result};
use crate::geometry::{Direction, Geometry, Partition1D, SphericalTriangle, SphericalTriangulation, Vec3};

const NEWTON_TOL: f64 = 1e-15;

/// Legendre polynomial `P_n(x)` and `P_{n-1}(x)`.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for l in 1..n {
        let lf = l as f64;
        let p2 = ((2.0 * lf + 1.0) * x * p1 - lf * p0) / (lf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// Gauss–Lobatto nodes and weights on `[-1, 1]` with `points` nodes,
/// endpoints included. Exact to degree `2·points − 3`.
pub fn gauss_lobatto(points: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if points < 2 {
        return Err(Error::invalid("Gauss-Lobatto needs at least 2 points"));
    }
    let n = points - 1;
    let nf = n as f64;
    let mut nodes = vec![0.0; points];
    let mut weights = vec![0.0; points];
    nodes[0] = -1.0;
    nodes[n] = 1.0;
    // interior nodes: roots of P'_n, Newton from Chebyshev-Lobatto guesses
    for i in 1..n {
        let mut x = -(std::f64::consts::PI * i as f64 / nf).cos();
        for _ in 0..100 {
            let (p, pm1) = legendre_pair(n, x);
            let dp = nf * (x * p - pm1) / (x * x - 1.0);
            let d2p = (2.0 * x * dp - nf * (nf + 1.0) * p) / (1.0 - x * x);
            let dx = dp / d2p;
            x -= dx;
            if dx.abs() < NEWTON_TOL {
                break;
            }
        }
        nodes[i] = x;
    }
    for i in 0..points {
        let (p, _) = legendre_pair(n, nodes[i]);
        weights[i] = 2.0 / (nf * (nf + 1.0) * p * p);
    }
    Ok((nodes, weights))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`; exact to degree
/// `2·points − 1`.
pub fn gauss_legendre(points: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if points < 1 {
        return Err(Error::invalid("Gauss-Legendre needs at least 1 point"));
    }
    let nf = points as f64;
    let mut nodes = vec![0.0; points];
    let mut weights = vec![0.0; points];
    for i in 0..points {
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, pm1) = legendre_pair(points, x);
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < NEWTON_TOL {
                let (p, pm1) = legendre_pair(points, x);
                dp = nf * (x * p - pm1) / (x * x - 1.0);
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    Ok((nodes, weights))
}

/// Collapsed Gauss–Legendre rule on the reference triangle
/// `{(x, y): x, y ≥ 0, x + y ≤ 1}`, exact to degree `degree`. Returns
/// barycentric nodes and weights summing to 1/2.
pub fn reference_triangle_rule(degree: usize) -> Result<(Vec<[f64; 3]>, Vec<f64>)> {
    if degree < 1 {
        return Err(Error::invalid("triangle rule degree must be at least 1"));
    }
    let m = (degree + 3) / 2;
    let (x, w) = gauss_legendre(m)?;
    let mut nodes = Vec::with_capacity(m * m);
    let mut weights = Vec::with_capacity(m * m);
    for i in 0..m {
        let s = 0.5 * (x[i] + 1.0);
        for j in 0..m {
            let t = 0.5 * (x[j] + 1.0);
            let (px, py) = (s, (1.0 - s) * t);
            nodes.push([1.0 - px - py, px, py]);
            weights.push(0.25 * w[i] * w[j] * (1.0 - s));
        }
    }
    Ok((nodes, weights))
}

/// A rule on one spherical triangle: the reference rule mapped radially
/// with surface factor `(x·n̂)/|x|³`, rescaled to the exact spherical area.
pub fn spherical_triangle_rule(tri: &SphericalTriangle, degree: usize) -> Result<(Vec<Vec3>, Vec<f64>)> {
    let (bary, wref) = reference_triangle_rule(degree)?;
    Ok(map_reference(tri, &bary, &wref))
}

fn map_reference(tri: &SphericalTriangle, bary: &[[f64; 3]], wref: &[f64]) -> (Vec<Vec3>, Vec<f64>) {
    let [a, b, c] = tri.vertices();
    let jac = 2.0 * tri.flat_area();
    let d = tri.plane_offset();
    let mut nodes = Vec::with_capacity(bary.len());
    let mut weights = Vec::with_capacity(bary.len());
    for (l, &w) in bary.iter().zip(wref) {
        let x = a * l[0] + b * l[1] + c * l[2];
        let r = x.norm();
        nodes.push(x / r);
        weights.push(w * jac * d / (r * r * r));
    }
    let scale = tri.area() / weights.iter().sum::<f64>();
    weights.iter_mut().for_each(|w| *w *= scale);
    (nodes, weights)
}

/// Resolution of the fine rules used for reference integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FineResolution {
    /// Minimum number of sub-intervals over `[-1, 1]`.
    pub subintervals: usize,
    /// Gauss–Lobatto points per sub-interval.
    pub points: usize,
    /// Refinement level of the triangulation carrying the spherical rule.
    pub level: usize,
    /// Polynomial degree of the flat reference rule.
    pub degree: usize,
}

impl Default for FineResolution {
    fn default() -> Self {
        Self {
            subintervals: 200,
            points: 20,
            level: 3,
            degree: 18,
        }
    }
}

/// Nodes and positive weights grouped into elements; every node carries the
/// index of the basis cell it is evaluated in.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    geometry: Geometry,
    nodes: Vec<Direction>,
    weights: Vec<f64>,
    cells: Vec<usize>,
    elements: Vec<Range<usize>>,
}

impl QuadratureRule {
    fn empty(geometry: Geometry) -> Self {
        Self {
            geometry,
            nodes: Vec::new(),
            weights: Vec::new(),
            cells: Vec::new(),
            elements: Vec::new(),
        }
    }

    fn push_element(&mut self, nodes: impl IntoIterator<Item = (Direction, f64)>, cell: usize) {
        let start = self.nodes.len();
        for (x, w) in nodes {
            self.nodes.push(x);
            self.weights.push(w);
            self.cells.push(cell);
        }
        self.elements.push(start..self.nodes.len());
    }

    /// Gauss–Lobatto rule with `points` nodes on each interval.
    pub fn composite(partition: &Partition1D, points: usize) -> Result<Self> {
        let pieces: Vec<_> = (0..partition.intervals())
            .map(|j| {
                let (a, b) = partition.interval(j);
                (a, b, j)
            })
            .collect();
        Self::on_pieces(&pieces, points)
    }

    /// Gauss–Lobatto rule on every interval of `partition` split into `m`
    /// pieces and at `breakpoints`; sub-intervals keep their parent index.
    pub fn composite_refined(partition: &Partition1D, m: usize, breakpoints: &[f64], points: usize) -> Result<Self> {
        Self::on_pieces(&partition.subdivide(m, breakpoints), points)
    }

    fn on_pieces(pieces: &[(f64, f64, usize)], points: usize) -> Result<Self> {
        let (x, w) = gauss_lobatto(points)?;
        let mut rule = Self::empty(Geometry::Slab);
        for &(a, b, cell) in pieces {
            if !(b - a >= 1e-14) {
                return Err(Error::invalid(format!("degenerate interval [{a}, {b}]")));
            }
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            let n = x.len();
            rule.push_element(
                x.iter().zip(&w).enumerate().map(|(i, (xi, wi))| {
                    // pin the endpoints exactly
                    let mu = match i {
                        0 => a,
                        _ if i == n - 1 => b,
                        _ => mid + half * xi,
                    };
                    (Direction::Slab(mu), half * wi)
                }),
                cell,
            );
        }
        Ok(rule)
    }

    /// Mapped triangle rule of the given degree on every triangle.
    pub fn spherical(mesh: &SphericalTriangulation, degree: usize) -> Result<Self> {
        Self::spherical_refined(mesh, 0, degree)
    }

    /// Rule on `mesh` refined `extra` times; nodes keep the index of their
    /// ancestor triangle in `mesh`.
    pub fn spherical_refined(mesh: &SphericalTriangulation, extra: usize, degree: usize) -> Result<Self> {
        let (bary, wref) = reference_triangle_rule(degree)?;
        let mut fine = mesh.clone();
        for _ in 0..extra {
            fine = fine.refine();
        }
        let per_parent = 4usize.pow(extra as u32);
        let mut rule = Self::empty(Geometry::Sphere);
        for (i, tri) in fine.elements().iter().enumerate() {
            let (nodes, weights) = map_reference(tri, &bary, &wref);
            rule.push_element(
                nodes.into_iter().map(Direction::Sphere).zip(weights),
                i / per_parent,
            );
        }
        Ok(rule)
    }

    /// A rule fitted to the cells of `basis`: `points` Gauss–Lobatto nodes
    /// per interval in slab geometry, a degree-`degree` rule per triangle on
    /// the sphere. Full-moment families use one interval or the octants.
    pub fn for_basis(basis: &AngularBasis, points: usize, degree: usize) -> Result<Self> {
        match basis {
            AngularBasis::HatFunctions1D(p) | AngularBasis::PartialMoments1D(p) => Self::composite(p, points),
            AngularBasis::HatFunctionsSphere(t) | AngularBasis::PartialMomentsSphere(t) => {
                Self::spherical(t, degree)
            }
            AngularBasis::SphericalHarmonics { .. } => {
                Self::spherical(&SphericalTriangulation::octants(), degree)
            }
            _ => Self::composite(&Partition1D::equidistant(1)?, points),
        }
    }

    /// Fine rule for reference integrals against `basis`, additionally split
    /// at the slab `breakpoints` of a discontinuous integrand.
    pub fn fine(basis: &AngularBasis, breakpoints: &[f64], res: FineResolution) -> Result<Self> {
        match basis.geometry() {
            Geometry::Slab => {
                let partition = match basis.partition() {
                    Some(p) => p.clone(),
                    None => Partition1D::equidistant(1)?,
                };
                let k = partition.intervals();
                let m = res.subintervals.div_ceil(k);
                Self::composite_refined(&partition, m, breakpoints, res.points)
            }
            Geometry::Sphere => {
                let mesh = match basis.triangulation() {
                    Some(t) => t.as_ref().clone(),
                    None => SphericalTriangulation::octants(),
                };
                let extra = res.level.saturating_sub(mesh.level());
                Self::spherical_refined(&mesh, extra, res.degree)
            }
        }
    }

    /// A rule whose node set is (up to the cell boundaries of `basis`) the
    /// same for every basis of a geometry: `subintervals` equal pieces in
    /// slab geometry, the level-`level` triangulation on the sphere.
    pub fn shared(basis: &AngularBasis, res: FineResolution) -> Result<Self> {
        match basis.geometry() {
            Geometry::Slab => {
                let partition = match basis.partition() {
                    Some(p) => p.clone(),
                    None => Partition1D::equidistant(1)?,
                };
                let grid = Partition1D::equidistant(res.subintervals)?;
                Self::composite_refined(&partition, 1, grid.nodes(), res.points)
            }
            Geometry::Sphere => Self::fine(basis, &[], res),
        }
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Direction] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Basis cell of every node.
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn elements(&self) -> &[Range<usize>] {
        &self.elements
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Element midpoints (slab) or radially projected centroids (sphere).
    pub fn element_midpoints(&self) -> Vec<(Direction, usize)> {
        self.elements
            .iter()
            .map(|r| {
                let cell = self.cells[r.start];
                match self.geometry {
                    Geometry::Slab => {
                        let a = self.nodes[r.start].slab().unwrap_or(0.0);
                        let b = self.nodes[r.end - 1].slab().unwrap_or(0.0);
                        (Direction::Slab(0.5 * (a + b)), cell)
                    }
                    Geometry::Sphere => {
                        let s: Vec3 = self.nodes[r.clone()]
                            .iter()
                            .zip(&self.weights[r.clone()])
                            .map(|(x, w)| x.sphere().unwrap_or_else(Vec3::zeros) * *w)
                            .sum();
                        (Direction::Sphere(s.normalize()), cell)
                    }
                }
            })
            .collect()
    }

    /// `Σ w_i f(x_i)` for a vector-valued integrand evaluated with the node's
    /// cell, accumulated in element order.
    pub fn integrate<F>(&self, mut f: F) -> Result<Vec<f64>>
    where
        F: FnMut(&Direction, usize) -> Result<Vec<f64>>,
    {
        let mut acc: Vec<f64> = Vec::new();
        for (i, ((x, w), cell)) in self.nodes.iter().zip(&self.weights).zip(&self.cells).enumerate() {
            let v = f(x, *cell).map_err(|e| Error::invalid(format!("integrand failed at node {i} ({x}): {e}")))?;
            if acc.is_empty() {
                acc = vec![0.0; v.len()];
            } else if acc.len() != v.len() {
                return Err(Error::invalid(format!("integrand changed length at node {i}")));
            }
            for (a, vi) in acc.iter_mut().zip(v) {
                *a += w * vi;
            }
        }
        Ok(acc)
    }

    pub fn integrate_scalar<F>(&self, mut f: F) -> f64
    where
        F: FnMut(&Direction) -> f64,
    {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }

    /// `⟨b⟩` under this rule.
    pub fn integrate_basis(&self, basis: &AngularBasis) -> Result<Vec<f64>> {
        let table = BasisTable::new(basis, self)?;
        Ok(table.integrate_weighted(|_| 1.0))
    }

    /// Checks that every node of `partition` is a rule node of each adjacent
    /// interval, as nodal realizability witnesses require.
    pub fn check_partition_nodes(&self, partition: &Partition1D) -> Result<()> {
        if self.geometry != Geometry::Slab {
            return Err(Error::RuleHypothesis("not a slab rule".into()));
        }
        let k = partition.intervals();
        for (j, &mu) in partition.nodes().iter().enumerate() {
            for cell in [j.checked_sub(1), (j < k).then_some(j)].into_iter().flatten() {
                let hit = self
                    .nodes
                    .iter()
                    .zip(&self.cells)
                    .any(|(x, &c)| c == cell && x.slab() == Some(mu));
                if !hit {
                    return Err(Error::RuleHypothesis(format!(
                        "partition node {mu} is not a node of interval {cell}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Sparse basis values at every node of a rule (CSR layout).
#[derive(Clone, Debug)]
pub struct BasisTable {
    dimension: usize,
    offsets: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl BasisTable {
    pub fn new(basis: &AngularBasis, rule: &QuadratureRule) -> Result<Self> {
        if basis.geometry() != rule.geometry() {
            return Err(Error::invalid("basis and rule live on different domains"));
        }
        let mut offsets = Vec::with_capacity(rule.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut scratch = Vec::new();
        offsets.push(0);
        for (i, (x, &cell)) in rule.nodes().iter().zip(rule.cells()).enumerate() {
            basis
                .evaluate_sparse(x, cell, &mut scratch)
                .map_err(|e| Error::invalid(format!("basis evaluation failed at node {i}: {e}")))?;
            for &(k, v) in &scratch {
                indices.push(k);
                values.push(v);
            }
            offsets.push(indices.len());
        }
        Ok(Self {
            dimension: basis.dimension(),
            offsets,
            indices,
            values,
            weights: rule.weights().to_vec(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nonzero `(index, value)` pairs of node `q`.
    pub fn row(&self, q: usize) -> (&[usize], &[f64]) {
        let r = self.offsets[q]..self.offsets[q + 1];
        (&self.indices[r.clone()], &self.values[r])
    }

    /// `bᵀα` at node `q`.
    pub fn dot(&self, q: usize, alpha: &[f64]) -> f64 {
        let (idx, val) = self.row(q);
        idx.iter().zip(val).map(|(&i, v)| v * alpha[i]).sum()
    }

    /// `Σ_q w_q g(q) b(x_q)`.
    pub fn integrate_weighted<G: FnMut(usize) -> f64>(&self, mut g: G) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension];
        for q in 0..self.len() {
            let s = self.weights[q] * g(q);
            let (idx, val) = self.row(q);
            for (&i, v) in idx.iter().zip(val) {
                out[i] += s * v;
            }
        }
        out
    }

    /// Half bandwidth of `⟨b bᵀ⟩`'s sparsity pattern.
    pub fn bandwidth(&self) -> usize {
        (0..self.len())
            .map(|q| {
                let (idx, _) = self.row(q);
                let lo = idx.iter().min().copied().unwrap_or(0);
                let hi = idx.iter().max().copied().unwrap_or(0);
                hi - lo
            })
            .max()
            .unwrap_or(0)
    }
}
