//! Hankel-matrix realizability for full moments in slab geometry.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::basis::{AngularBasis, MomentVector};
use crate::error::{Error, Result};
use crate::geometry::Direction;

use super::{Atom, AtomicDensity, Status, Verdict};

const EIG_TOL: f64 = 1e-12;

/// The Hankel matrices `A(k)`, `B(k)`, `C(k)` of a monomial moment vector.
#[derive(Clone, Debug)]
pub struct HankelSet<'a> {
    u: &'a [f64],
}

impl<'a> HankelSet<'a> {
    pub fn new(u: &'a [f64]) -> Self {
        Self { u }
    }

    /// `(u_{i+j})_{i,j=0..k}`.
    pub fn a(&self, k: usize) -> DMatrix<f64> {
        DMatrix::from_fn(k + 1, k + 1, |i, j| self.u[i + j])
    }

    /// `(u_{i+j+1})_{i,j=0..k}`.
    pub fn b(&self, k: usize) -> DMatrix<f64> {
        DMatrix::from_fn(k + 1, k + 1, |i, j| self.u[i + j + 1])
    }

    /// `(u_{i+j})_{i,j=1..k}`.
    pub fn c(&self, k: usize) -> DMatrix<f64> {
        DMatrix::from_fn(k, k, |i, j| self.u[i + j + 2])
    }
}

/// Definiteness class of a symmetric matrix with a relative eigenvalue band.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Definiteness {
    Indefinite,
    Semidefinite,
    Definite,
}

fn definiteness(m: &DMatrix<f64>) -> Definiteness {
    if m.nrows() == 0 {
        return Definiteness::Definite;
    }
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    let lmin = eig.min();
    let lmax = eig.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
    let band = EIG_TOL * lmax;
    if lmin > band && lmax > 0.0 {
        Definiteness::Definite
    } else if lmin >= -band {
        Definiteness::Semidefinite
    } else {
        Definiteness::Indefinite
    }
}

/// Coefficients `T` with `μ^i = Σ_j T_ij P_j(μ)`, so monomial moments are
/// `T · (Legendre moments)`.
pub fn legendre_to_monomial(order: usize) -> DMatrix<f64> {
    let n = order + 1;
    let mut t = DMatrix::zeros(n, n);
    t[(0, 0)] = 1.0;
    for i in 0..order {
        // μ P_j = ((j+1) P_{j+1} + j P_{j-1}) / (2j+1)
        for j in 0..=i {
            let c = t[(i, j)];
            if c == 0.0 {
                continue;
            }
            let jf = j as f64;
            t[(i + 1, j + 1)] += c * (jf + 1.0) / (2.0 * jf + 1.0);
            if j > 0 {
                t[(i + 1, j - 1)] += c * jf / (2.0 * jf + 1.0);
            }
        }
    }
    t
}

fn monomial_values(u: &MomentVector) -> Result<Vec<f64>> {
    match u.basis() {
        AngularBasis::Monomial1D { .. } => Ok(u.values().to_vec()),
        AngularBasis::Legendre1D { order } => {
            let t = legendre_to_monomial(*order);
            Ok((&t * nalgebra::DVector::from_column_slice(u.values())).as_slice().to_vec())
        }
        other => Err(Error::invalid(format!(
            "Hankel conditions need a full-moment slab basis, got {}",
            other.model_name(true)
        ))),
    }
}

/// Realizability class of monomial moments `u_0..u_N`.
fn hankel_status(u: &[f64]) -> Status {
    let h = HankelSet::new(u);
    let n = u.len() - 1;
    let k = n / 2;
    let classes = if n.is_multiple_of(2) {
        let second = if k == 0 {
            Definiteness::Definite
        } else {
            definiteness(&(h.a(k - 1) - h.c(k)))
        };
        [definiteness(&h.a(k)), second]
    } else {
        let (a, b) = (h.a(k), h.b(k));
        [definiteness(&(&a - &b)), definiteness(&(&a + &b))]
    };
    match classes.iter().min().unwrap() {
        Definiteness::Definite => Status::StrictlyRealizable,
        Definiteness::Semidefinite => Status::BoundaryRealizable,
        Definiteness::Indefinite => Status::NotRealizable,
    }
}

/// Number of atoms of a minimal representing measure.
fn hankel_rank(u: &[f64]) -> usize {
    if u[0] == 0.0 {
        return 0;
    }
    let n = u.len() - 1;
    let even = if n.is_multiple_of(2) { u } else { &u[..n] };
    let k = (even.len() - 1) / 2;
    let h = HankelSet::new(even);
    (1..=k)
        .find(|&j| definiteness(&h.a(j)) != Definiteness::Definite)
        .unwrap_or(k + 1)
}

/// Recurrence coefficients of the monic orthogonal polynomials of the
/// measure with moments `m_0..m_{2r-1}` (Chebyshev algorithm).
fn chebyshev(m: &[f64], r: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    let len = 2 * r;
    let mut a = vec![0.0; r];
    let mut b = vec![0.0; r];
    let mut prev = vec![0.0; len];
    let mut cur = m[..len].to_vec();
    a[0] = m[1] / m[0];
    b[0] = m[0];
    for k in 1..r {
        let mut next = vec![0.0; len];
        for l in k..(len - k) {
            next[l] = cur[l + 1] - a[k - 1] * cur[l] - b[k - 1] * prev[l];
        }
        if !(next[k] > 0.0) {
            return None;
        }
        a[k] = next[k + 1] / next[k] - cur[k] / cur[k - 1];
        b[k] = next[k] / cur[k - 1];
        prev = cur;
        cur = next;
    }
    Some((a, b))
}

/// `r`-point Gauss rule for the moments `m_0..m_{2r-1}` (Golub–Welsch).
fn gauss_from_moments(m: &[f64], r: usize) -> Option<Vec<(f64, f64)>> {
    let (a, b) = chebyshev(m, r)?;
    let mut j = DMatrix::zeros(r, r);
    for i in 0..r {
        j[(i, i)] = a[i];
        if i + 1 < r {
            let off = b[i + 1].sqrt();
            j[(i, i + 1)] = off;
            j[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(j);
    Some(
        (0..r)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (m[0] * v0 * v0, eig.eigenvalues[i])
            })
            .collect(),
    )
}

/// Midpoint of the admissible range of `u_{2k+1}` given `u_0..u_{2k}` with
/// `A(k-1) ± B(k-1)` positive definite.
fn odd_extension(u: &[f64]) -> Option<f64> {
    let k = (u.len() - 1) / 2;
    if k == 0 {
        return Some(0.0);
    }
    // corner of A(k) ∓ B(k) is u_{2k} ∓ x; Schur complement against the
    // leading k×k block bounds x
    let mut ext = u.to_vec();
    ext.push(0.0);
    let h = HankelSet::new(&ext);
    let bound = |sign: f64| -> Option<f64> {
        let m = h.a(k) + h.b(k) * sign;
        let lead = m.view((0, 0), (k, k)).into_owned();
        let col = m.view((0, k), (k, 1)).into_owned();
        let chol = lead.cholesky()?;
        let s = chol.solve(&col);
        Some((col.transpose() * s)[(0, 0)])
    };
    let s_minus = bound(-1.0)?; // u_{2k} - x >= s_minus
    let s_plus = bound(1.0)?; // u_{2k} + x >= s_plus
    let hi = u[2 * k] - s_minus;
    let lo = s_plus - u[2 * k];
    (lo <= hi).then_some(0.5 * (lo + hi))
}

fn monomial_moments(atoms: &[(f64, f64)], n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| atoms.iter().map(|(w, x)| w * x.powi(i as i32)).sum())
        .collect()
}

fn hankel_witness(u: &[f64], rank: usize, basis: &AngularBasis) -> Option<AtomicDensity> {
    if rank == 0 {
        return Some(AtomicDensity::default());
    }
    let mut m = u.to_vec();
    if m.len() < 2 * rank {
        m.push(odd_extension(u)?);
    }
    let atoms = gauss_from_moments(&m, rank)?;
    let scale = u.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let reproduced = monomial_moments(&atoms, u.len());
    let ok = atoms.iter().all(|&(w, x)| w > 0.0 && x.abs() <= 1.0 + 1e-12)
        && reproduced.iter().zip(u).all(|(a, b)| (a - b).abs() <= 1e-12 * scale);
    if !ok {
        return None;
    }
    let _ = basis;
    Some(AtomicDensity {
        atoms: atoms
            .into_iter()
            .map(|(w, x)| Atom {
                weight: w,
                location: Direction::Slab(x.clamp(-1.0, 1.0)),
                cell: 0,
            })
            .collect(),
    })
}

/// Hankel realizability test for slab full moments (monomial or Legendre).
pub fn check_full_1d(u: &MomentVector) -> Result<Verdict> {
    let mono = monomial_values(u)?;
    let status = hankel_status(&mono);
    if status == Status::NotRealizable {
        return Ok(Verdict::not_realizable());
    }
    let rank = hankel_rank(&mono);
    let witness = hankel_witness(&mono, rank, u.basis());
    Ok(Verdict {
        status,
        rank: Some(rank),
        witness,
    })
}
