//! Realizability verdicts, ranks and atomic representing densities.

mod hankel;
mod numerical;

use std::fmt;

use crate::basis::{AngularBasis, MomentVector};
use crate::error::{Error, Result};
use crate::geometry::{Direction, Partition1D, SphericalTriangle, SphericalTriangulation, Vec3, MEMBERSHIP_TOL};

pub use hankel::{check_full_1d, legendre_to_monomial, HankelSet};
pub use numerical::{numerically_realizable, NumericalVerdict};

/// Relative tolerance for witness reproduction.
pub const WITNESS_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    StrictlyRealizable,
    BoundaryRealizable,
    NotRealizable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::StrictlyRealizable => "strictly realizable",
            Status::BoundaryRealizable => "boundary realizable",
            Status::NotRealizable => "not realizable",
        })
    }
}

/// A weighted Dirac mass, evaluated with the basis restricted to `cell`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub weight: f64,
    pub location: Direction,
    pub cell: usize,
}

/// A finite combination of Dirac masses.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AtomicDensity {
    pub atoms: Vec<Atom>,
}

impl AtomicDensity {
    /// `Σ w_i b|_{cell_i}(x_i)`.
    pub fn moments(&self, basis: &AngularBasis) -> Result<Vec<f64>> {
        let mut u = vec![0.0; basis.dimension()];
        let mut row = Vec::new();
        for atom in &self.atoms {
            basis.evaluate_sparse(&atom.location, atom.cell, &mut row)?;
            for &(i, v) in &row {
                u[i] += atom.weight * v;
            }
        }
        Ok(u)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Whether the atoms reproduce `u` within [`WITNESS_TOL`] relative to
    /// its largest entry.
    pub fn reproduces(&self, basis: &AngularBasis, u: &[f64]) -> bool {
        let scale = u.iter().fold(0.0_f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
        match self.moments(basis) {
            Ok(m) => m.iter().zip(u).all(|(a, b)| (a - b).abs() <= WITNESS_TOL * scale),
            Err(_) => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub status: Status,
    pub rank: Option<usize>,
    pub witness: Option<AtomicDensity>,
}

impl Verdict {
    pub fn not_realizable() -> Self {
        Self {
            status: Status::NotRealizable,
            rank: None,
            witness: None,
        }
    }

    /// Membership in the interior (`strict`) or in the closure.
    pub fn is_realizable(&self, strict: bool) -> bool {
        match self.status {
            Status::StrictlyRealizable => true,
            Status::BoundaryRealizable => !strict,
            Status::NotRealizable => false,
        }
    }
}

fn combine(a: Status, b: Status) -> Status {
    use Status::*;
    match (a, b) {
        (NotRealizable, _) | (_, NotRealizable) => NotRealizable,
        (BoundaryRealizable, _) | (_, BoundaryRealizable) => BoundaryRealizable,
        _ => StrictlyRealizable,
    }
}

/// A maximal run `start..=end` of positive entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PositiveBlock {
    pub start: usize,
    pub end: usize,
}

impl PositiveBlock {
    pub fn order(&self) -> usize {
        self.end - self.start + 1
    }
}

/// Decomposition of a non-negative vector into its positive blocks.
pub fn positive_blocks(u: &[f64]) -> Result<Vec<PositiveBlock>> {
    if let Some(i) = u.iter().position(|&x| !(x >= 0.0)) {
        return Err(Error::invalid(format!("entry {i} is negative or NaN")));
    }
    let n = u.len();
    let at = |i: isize| if i < 0 || i as usize >= n { 0.0 } else { u[i as usize] };
    let starts: Vec<usize> = (0..n).filter(|&j| at(j as isize - 1) == 0.0 && u[j] > 0.0).collect();
    let ends: Vec<usize> = (0..n).filter(|&j| u[j] > 0.0 && at(j as isize + 1) == 0.0).collect();
    Ok(starts
        .into_iter()
        .zip(ends)
        .map(|(start, end)| PositiveBlock { start, end })
        .collect())
}

/// Atoms for a positive hat block on consecutive nodes: neighbouring
/// entries are merged pairwise into one atom between their nodes; an odd
/// block first splits its last interior node in two.
fn hat_block_atoms(u: &[f64], nodes: &[f64], block: PositiveBlock) -> Vec<(f64, f64)> {
    let mut entries: Vec<(f64, f64)> = (block.start..=block.end).map(|i| (u[i], nodes[i])).collect();
    if entries.len() == 1 {
        return entries;
    }
    if entries.len() % 2 == 1 {
        let last_interior = entries.len() - 2;
        let (w, x) = entries[last_interior];
        entries[last_interior] = (0.5 * w, x);
        entries.insert(last_interior + 1, (0.5 * w, x));
    }
    entries
        .chunks(2)
        .map(|p| {
            let w = p[0].0 + p[1].0;
            (w, (p[0].0 * p[0].1 + p[1].0 * p[1].1) / w)
        })
        .collect()
}

fn hat_status(u: &[f64]) -> Status {
    if u.iter().any(|&x| !(x >= 0.0)) {
        Status::NotRealizable
    } else if u.iter().all(|&x| x > 0.0) {
        Status::StrictlyRealizable
    } else {
        Status::BoundaryRealizable
    }
}

fn hat_1d(u: &MomentVector, partition: &Partition1D) -> Result<Verdict> {
    let values = u.values();
    let status = hat_status(values);
    if status == Status::NotRealizable {
        return Ok(Verdict::not_realizable());
    }
    let blocks = positive_blocks(values)?;
    let rank = blocks.iter().map(|b| b.order().div_ceil(2)).sum();
    let nodes = partition.nodes();
    let mut atoms = Vec::with_capacity(rank);
    for b in blocks {
        for (w, x) in hat_block_atoms(values, nodes, b) {
            let x = x.clamp(-1.0, 1.0);
            atoms.push(Atom {
                weight: w,
                location: Direction::Slab(x),
                cell: partition.locate(x)?,
            });
        }
    }
    let witness = AtomicDensity { atoms };
    let witness = witness.reproduces(u.basis(), values).then_some(witness);
    Ok(Verdict {
        status,
        rank: Some(rank),
        witness,
    })
}

/// Index of a triangle having `vertex` as a corner.
fn vertex_cell(mesh: &SphericalTriangulation, vertex: usize) -> usize {
    mesh.triangles()
        .iter()
        .position(|t| t.contains(&vertex))
        .expect("every vertex belongs to a triangle")
}

fn hat_sphere(u: &MomentVector, mesh: &SphericalTriangulation) -> Verdict {
    let values = u.values();
    let status = hat_status(values);
    if status == Status::NotRealizable {
        return Verdict::not_realizable();
    }
    let atoms = values
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(i, &w)| Atom {
            weight: w,
            location: Direction::Sphere(mesh.vertices()[i]),
            cell: vertex_cell(mesh, i),
        })
        .collect();
    let witness = AtomicDensity { atoms };
    let witness = witness.reproduces(u.basis(), values).then_some(witness);
    Verdict {
        status,
        rank: None,
        witness,
    }
}

/// Realizability for the hat-function bases (slab or sphere).
pub fn check_hat(u: &MomentVector) -> Result<Verdict> {
    match u.basis() {
        AngularBasis::HatFunctions1D(p) => hat_1d(u, p),
        AngularBasis::HatFunctionsSphere(t) => Ok(hat_sphere(u, t)),
        other => Err(Error::invalid(format!("expected a hat basis, got {}", other.model_name(true)))),
    }
}

/// Realizability of one interval's partial moments `(u0, u1)` on `[a, b]`.
pub(crate) fn pm_interval_status(u0: f64, u1: f64, a: f64, b: f64) -> Status {
    if u0 == 0.0 && u1 == 0.0 {
        return Status::BoundaryRealizable;
    }
    if !(u0 > 0.0) || !u1.is_finite() {
        return Status::NotRealizable;
    }
    let m = u1 / u0;
    if m > a && m < b {
        Status::StrictlyRealizable
    } else if m >= a - MEMBERSHIP_TOL && m <= b + MEMBERSHIP_TOL {
        Status::BoundaryRealizable
    } else {
        Status::NotRealizable
    }
}

/// Realizability for slab partial moments, grouped `(u_{0,j}, u_{1,j})`.
pub fn check_pm_1d(u: &MomentVector) -> Result<Verdict> {
    let AngularBasis::PartialMoments1D(partition) = u.basis() else {
        return Err(Error::invalid("expected a slab partial-moment basis"));
    };
    let values = u.values();
    if values.len() % 2 == 1 || values.iter().any(|x| x.is_nan()) {
        return Err(Error::invalid("partial moments need finite (u0, u1) pairs"));
    }
    let mut status = Status::StrictlyRealizable;
    let mut atoms = Vec::new();
    for j in 0..partition.intervals() {
        let (a, b) = partition.interval(j);
        let (u0, u1) = (values[2 * j], values[2 * j + 1]);
        let s = pm_interval_status(u0, u1, a, b);
        status = combine(status, s);
        if s != Status::NotRealizable && u0 > 0.0 {
            atoms.push(Atom {
                weight: u0,
                location: Direction::Slab((u1 / u0).clamp(a, b)),
                cell: j,
            });
        }
    }
    if status == Status::NotRealizable {
        return Ok(Verdict::not_realizable());
    }
    let rank = atoms.len();
    let witness = AtomicDensity { atoms };
    let witness = witness.reproduces(u.basis(), values).then_some(witness);
    Ok(Verdict {
        status,
        rank: Some(rank),
        witness,
    })
}

/// Realizability of one spherical triangle's partial moments
/// `(u⁰, u¹_x, u¹_y, u¹_z)`; atoms are tagged with `cell`.
pub fn check_pm_3d(uk: [f64; 4], tri: &SphericalTriangle, cell: usize) -> Result<Verdict> {
    let u0 = uk[0];
    if u0 < 0.0 || uk.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(format!("triangle mass {u0} must be finite and non-negative")));
    }
    let u1 = Vec3::new(uk[1], uk[2], uk[3]);
    if u0 == 0.0 {
        return Ok(if u1 == Vec3::zeros() {
            Verdict {
                status: Status::BoundaryRealizable,
                rank: None,
                witness: Some(AtomicDensity::default()),
            }
        } else {
            Verdict::not_realizable()
        });
    }
    let mean = u1 / u0;
    let status = if tri.in_hull(mean, true) {
        Status::StrictlyRealizable
    } else if tri.in_hull(mean, false) {
        Status::BoundaryRealizable
    } else {
        return Ok(Verdict::not_realizable());
    };
    let witness = pm_3d_witness(u0, mean, tri, cell);
    let witness = witness.filter(|w| {
        let scale = uk.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        let mut sum = [0.0; 4];
        for a in &w.atoms {
            let x = a.location.sphere().unwrap_or_else(Vec3::zeros);
            sum[0] += a.weight;
            for k in 0..3 {
                sum[k + 1] += a.weight * x[k];
            }
        }
        sum.iter().zip(&uk).all(|(s, u)| (s - u).abs() <= WITNESS_TOL * scale)
    });
    Ok(Verdict {
        status,
        rank: None,
        witness,
    })
}

/// Surface atom, vertex atoms, or their convex combination along the ray
/// through the normalized first moment.
fn pm_3d_witness(u0: f64, mean: Vec3, tri: &SphericalTriangle, cell: usize) -> Option<AtomicDensity> {
    let r = mean.norm();
    if !(r > 0.0) {
        return None;
    }
    let dir = mean / r;
    let mut atoms = Vec::new();
    let mut push = |w: f64, x: Vec3| {
        if w > 0.0 {
            atoms.push(Atom {
                weight: w,
                location: Direction::Sphere(x),
                cell,
            });
        }
    };
    if (r - 1.0).abs() <= MEMBERSHIP_TOL {
        push(u0, dir);
        return Some(AtomicDensity { atoms });
    }
    let q = tri.ray_plane(dir)?;
    let qn = q.norm();
    let lam = tri.planar_barycentric(if r <= qn { mean } else { q });
    let lam = lam.map(|l| l.max(0.0));
    let vertices = tri.vertices();
    let theta = if r <= qn { 0.0 } else { ((r - qn) / (1.0 - qn)).clamp(0.0, 1.0) };
    push(u0 * theta, dir);
    for k in 0..3 {
        push(u0 * (1.0 - theta) * lam[k], vertices[k]);
    }
    Some(AtomicDensity { atoms })
}

/// Realizability for partial moments on a spherical triangulation.
pub fn check_pm_sphere(u: &MomentVector) -> Result<Verdict> {
    let AngularBasis::PartialMomentsSphere(mesh) = u.basis() else {
        return Err(Error::invalid("expected a spherical partial-moment basis"));
    };
    let values = u.values();
    let mut status = Status::StrictlyRealizable;
    let mut atoms = Vec::new();
    let mut complete = true;
    for (j, tri) in mesh.elements().iter().enumerate() {
        let uk = [values[4 * j], values[4 * j + 1], values[4 * j + 2], values[4 * j + 3]];
        if uk[0] < 0.0 {
            return Ok(Verdict::not_realizable());
        }
        let v = check_pm_3d(uk, tri, j)?;
        status = combine(status, v.status);
        if status == Status::NotRealizable {
            return Ok(Verdict::not_realizable());
        }
        match v.witness {
            Some(w) => atoms.extend(w.atoms),
            None => complete = false,
        }
    }
    Ok(Verdict {
        status,
        rank: None,
        witness: complete.then_some(AtomicDensity { atoms }),
    })
}

/// Dispatches to the test matching the vector's basis.
pub fn check(u: &MomentVector) -> Result<Verdict> {
    match u.basis() {
        AngularBasis::Monomial1D { .. } | AngularBasis::Legendre1D { .. } => check_full_1d(u),
        AngularBasis::HatFunctions1D(_) | AngularBasis::HatFunctionsSphere(_) => check_hat(u),
        AngularBasis::PartialMoments1D(_) => check_pm_1d(u),
        AngularBasis::PartialMomentsSphere(_) => check_pm_sphere(u),
        AngularBasis::SphericalHarmonics { .. } => Err(Error::Unsupported(
            "realizability conditions for spherical harmonics".into(),
        )),
    }
}
