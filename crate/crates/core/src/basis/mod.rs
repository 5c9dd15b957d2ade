//! The seven angular basis families and their moment vectors.

mod harmonics;

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{Direction, Geometry, Partition1D, SphericalTriangulation, MEMBERSHIP_TOL};
use crate::quadrature::QuadratureRule;

pub use harmonics::{legendre, real_spherical_harmonics, sh_index};

/// Polynomial degree of the spherical rule used for integrals that have no
/// closed form here (isotropic moments of the spherical hat basis).
const ISOTROPIC_SPHERE_DEGREE: usize = 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisFamily {
    Monomial1D,
    Legendre1D,
    HatFunctions1D,
    PartialMoments1D,
    SphericalHarmonics,
    HatFunctionsSphere,
    PartialMomentsSphere,
}

/// An angular basis: a family plus its order or angular mesh.
#[derive(Clone, Debug, PartialEq)]
pub enum AngularBasis {
    Monomial1D { order: usize },
    Legendre1D { order: usize },
    HatFunctions1D(Partition1D),
    PartialMoments1D(Partition1D),
    SphericalHarmonics { order: usize },
    HatFunctionsSphere(Arc<SphericalTriangulation>),
    PartialMomentsSphere(Arc<SphericalTriangulation>),
}

impl AngularBasis {
    pub fn hat_sphere(level: usize) -> Self {
        AngularBasis::HatFunctionsSphere(Arc::new(SphericalTriangulation::with_level(level)))
    }

    pub fn partial_sphere(level: usize) -> Self {
        AngularBasis::PartialMomentsSphere(Arc::new(SphericalTriangulation::with_level(level)))
    }

    pub fn hat_equidistant(k: usize) -> Result<Self> {
        Ok(AngularBasis::HatFunctions1D(Partition1D::equidistant(k)?))
    }

    pub fn partial_equidistant(k: usize) -> Result<Self> {
        Ok(AngularBasis::PartialMoments1D(Partition1D::equidistant(k)?))
    }

    pub fn family(&self) -> BasisFamily {
        match self {
            AngularBasis::Monomial1D { .. } => BasisFamily::Monomial1D,
            AngularBasis::Legendre1D { .. } => BasisFamily::Legendre1D,
            AngularBasis::HatFunctions1D(_) => BasisFamily::HatFunctions1D,
            AngularBasis::PartialMoments1D(_) => BasisFamily::PartialMoments1D,
            AngularBasis::SphericalHarmonics { .. } => BasisFamily::SphericalHarmonics,
            AngularBasis::HatFunctionsSphere(_) => BasisFamily::HatFunctionsSphere,
            AngularBasis::PartialMomentsSphere(_) => BasisFamily::PartialMomentsSphere,
        }
    }

    pub fn geometry(&self) -> Geometry {
        match self {
            AngularBasis::Monomial1D { .. }
            | AngularBasis::Legendre1D { .. }
            | AngularBasis::HatFunctions1D(_)
            | AngularBasis::PartialMoments1D(_) => Geometry::Slab,
            _ => Geometry::Sphere,
        }
    }

    /// Number of basis functions `n`.
    pub fn dimension(&self) -> usize {
        match self {
            AngularBasis::Monomial1D { order } | AngularBasis::Legendre1D { order } => order + 1,
            AngularBasis::HatFunctions1D(p) => p.intervals() + 1,
            AngularBasis::PartialMoments1D(p) => 2 * p.intervals(),
            AngularBasis::SphericalHarmonics { order } => (order + 1) * (order + 1),
            AngularBasis::HatFunctionsSphere(t) => t.vertex_count(),
            AngularBasis::PartialMomentsSphere(t) => 4 * t.triangle_count(),
        }
    }

    pub fn is_piecewise(&self) -> bool {
        !matches!(
            self,
            AngularBasis::Monomial1D { .. }
                | AngularBasis::Legendre1D { .. }
                | AngularBasis::SphericalHarmonics { .. }
        )
    }

    pub fn partition(&self) -> Option<&Partition1D> {
        match self {
            AngularBasis::HatFunctions1D(p) | AngularBasis::PartialMoments1D(p) => Some(p),
            _ => None,
        }
    }

    pub fn triangulation(&self) -> Option<&Arc<SphericalTriangulation>> {
        match self {
            AngularBasis::HatFunctionsSphere(t) | AngularBasis::PartialMomentsSphere(t) => Some(t),
            _ => None,
        }
    }

    /// Number of mesh cells (1 for the full-moment families).
    pub fn cell_count(&self) -> usize {
        match self {
            AngularBasis::HatFunctions1D(p) | AngularBasis::PartialMoments1D(p) => p.intervals(),
            AngularBasis::HatFunctionsSphere(t) | AngularBasis::PartialMomentsSphere(t) => {
                t.triangle_count()
            }
            _ => 1,
        }
    }

    fn check_domain(&self, point: &Direction) -> Result<()> {
        match (self.geometry(), point) {
            (Geometry::Slab, Direction::Slab(mu)) => {
                if mu.is_finite() && mu.abs() <= 1.0 + MEMBERSHIP_TOL {
                    Ok(())
                } else {
                    Err(Error::OffDomain(point.to_string()))
                }
            }
            (Geometry::Sphere, Direction::Sphere(v)) => {
                if (v.norm() - 1.0).abs() <= MEMBERSHIP_TOL {
                    Ok(())
                } else {
                    Err(Error::OffDomain(point.to_string()))
                }
            }
            _ => Err(Error::OffDomain(format!("{point} has the wrong geometry"))),
        }
    }

    /// Cell containing the point, with the lowest-index tie-break.
    pub fn locate(&self, point: &Direction) -> Result<usize> {
        self.check_domain(point)?;
        match (self, point) {
            (AngularBasis::HatFunctions1D(p) | AngularBasis::PartialMoments1D(p), Direction::Slab(mu)) => {
                p.locate(*mu)
            }
            (
                AngularBasis::HatFunctionsSphere(t) | AngularBasis::PartialMomentsSphere(t),
                Direction::Sphere(v),
            ) => t.locate(*v),
            _ => Ok(0),
        }
    }

    /// Sparse basis values at a point, using the continuous extension of the
    /// given cell for piecewise families. `out` receives `(index, value)`
    /// pairs; indices not listed are zero.
    pub fn evaluate_sparse(&self, point: &Direction, cell: usize, out: &mut Vec<(usize, f64)>) -> Result<()> {
        self.check_domain(point)?;
        out.clear();
        match (self, point) {
            (AngularBasis::Monomial1D { order }, Direction::Slab(mu)) => {
                let mut v = 1.0;
                for i in 0..=*order {
                    out.push((i, v));
                    v *= mu;
                }
            }
            (AngularBasis::Legendre1D { order }, Direction::Slab(mu)) => {
                let mut p = vec![0.0; order + 1];
                legendre(*order, *mu, &mut p);
                out.extend(p.into_iter().enumerate());
            }
            (AngularBasis::HatFunctions1D(p), Direction::Slab(mu)) => {
                if !p.contains(cell, *mu) {
                    return Err(Error::OffDomain(format!("mu={mu} not in interval {cell}")));
                }
                let (a, b) = p.interval(cell);
                let w = b - a;
                out.push((cell, ((b - mu) / w).clamp(0.0, 1.0)));
                out.push((cell + 1, ((mu - a) / w).clamp(0.0, 1.0)));
            }
            (AngularBasis::PartialMoments1D(p), Direction::Slab(mu)) => {
                if !p.contains(cell, *mu) {
                    return Err(Error::OffDomain(format!("mu={mu} not in interval {cell}")));
                }
                out.push((2 * cell, 1.0));
                out.push((2 * cell + 1, *mu));
            }
            (AngularBasis::SphericalHarmonics { order }, Direction::Sphere(v)) => {
                let mut y = vec![0.0; (order + 1) * (order + 1)];
                real_spherical_harmonics(*order, *v, &mut y);
                out.extend(y.into_iter().enumerate());
            }
            (AngularBasis::HatFunctionsSphere(t), Direction::Sphere(v)) => {
                let lam = t.triangle(cell).spherical_barycentric(*v)?;
                let ids = t.triangles()[cell];
                for k in 0..3 {
                    out.push((ids[k], lam[k]));
                }
            }
            (AngularBasis::PartialMomentsSphere(t), Direction::Sphere(v)) => {
                if !t.triangle(cell).contains(*v, MEMBERSHIP_TOL) {
                    return Err(Error::OffDomain(format!("{point} not in triangle {cell}")));
                }
                out.extend([(4 * cell, 1.0), (4 * cell + 1, v.x), (4 * cell + 2, v.y), (4 * cell + 3, v.z)]);
            }
            _ => unreachable!("domain checked above"),
        }
        Ok(())
    }

    /// Dense basis values at a point; piecewise families use the element
    /// chosen by [`AngularBasis::locate`].
    pub fn evaluate(&self, point: &Direction) -> Result<Vec<f64>> {
        let cell = self.locate(point)?;
        self.evaluate_in_cell(point, cell)
    }

    /// Dense basis values using the continuous extension of `cell`.
    pub fn evaluate_in_cell(&self, point: &Direction, cell: usize) -> Result<Vec<f64>> {
        let mut sparse = Vec::new();
        self.evaluate_sparse(point, cell, &mut sparse)?;
        let mut dense = vec![0.0; self.dimension()];
        for (i, v) in sparse {
            dense[i] += v;
        }
        Ok(dense)
    }

    /// Coefficients `c` with `c·b ≡ 1`; the particle density is `ρ(u) = c·u`.
    pub fn constant_coefficients(&self) -> Vec<f64> {
        let n = self.dimension();
        let mut c = vec![0.0; n];
        match self {
            AngularBasis::Monomial1D { .. } | AngularBasis::Legendre1D { .. } => c[0] = 1.0,
            AngularBasis::SphericalHarmonics { .. } => c[0] = (4.0 * PI).sqrt(),
            AngularBasis::HatFunctions1D(_) | AngularBasis::HatFunctionsSphere(_) => c.fill(1.0),
            AngularBasis::PartialMoments1D(_) => c.iter_mut().step_by(2).for_each(|x| *x = 1.0),
            AngularBasis::PartialMomentsSphere(_) => c.iter_mut().step_by(4).for_each(|x| *x = 1.0),
        }
        c
    }

    /// Isotropic moment `⟨b⟩`.
    pub fn isotropic_moment(&self) -> MomentVector {
        let values = match self {
            AngularBasis::Monomial1D { order } => (0..=*order)
                .map(|i| if i % 2 == 0 { 2.0 / (i as f64 + 1.0) } else { 0.0 })
                .collect(),
            AngularBasis::Legendre1D { order } => {
                let mut v = vec![0.0; order + 1];
                v[0] = 2.0;
                v
            }
            AngularBasis::SphericalHarmonics { order } => {
                let mut v = vec![0.0; (order + 1) * (order + 1)];
                v[0] = (4.0 * PI).sqrt();
                v
            }
            AngularBasis::HatFunctions1D(p) => {
                let k = p.intervals();
                (0..=k)
                    .map(|i| {
                        let left = if i > 0 { p.width(i - 1) } else { 0.0 };
                        let right = if i < k { p.width(i) } else { 0.0 };
                        0.5 * (left + right)
                    })
                    .collect()
            }
            AngularBasis::PartialMoments1D(p) => (0..p.intervals())
                .flat_map(|j| {
                    let (a, b) = p.interval(j);
                    [b - a, 0.5 * (b * b - a * a)]
                })
                .collect(),
            AngularBasis::PartialMomentsSphere(t) => t
                .elements()
                .iter()
                .flat_map(|tri| {
                    let m = tri.first_moment();
                    [tri.area(), m.x, m.y, m.z]
                })
                .collect(),
            AngularBasis::HatFunctionsSphere(t) => {
                let rule = QuadratureRule::spherical_refined(t, 2, ISOTROPIC_SPHERE_DEGREE)
                    .expect("spherical rule for a valid triangulation");
                rule.integrate_basis(self).expect("rule nodes lie in their cells")
            }
        };
        MomentVector::new(values, self.clone()).expect("isotropic moment has basis length")
    }

    /// Particle density `ρ(u)` of a moment vector in this basis.
    pub fn density(&self, values: &[f64]) -> f64 {
        self.constant_coefficients()
            .iter()
            .zip(values)
            .map(|(c, u)| c * u)
            .sum()
    }

    /// Canonical model name for this basis with a nonlinear (`nonlinear =
    /// true`) or linear closure: `M_N`, `P_N`, `HFM_n`, `HFP_n`, `PMM_n`,
    /// `PMP_n`.
    pub fn model_name(&self, nonlinear: bool) -> String {
        let (tag_m, tag_p) = match self.family() {
            BasisFamily::Monomial1D | BasisFamily::Legendre1D | BasisFamily::SphericalHarmonics => ("M", "P"),
            BasisFamily::HatFunctions1D | BasisFamily::HatFunctionsSphere => ("HFM", "HFP"),
            BasisFamily::PartialMoments1D | BasisFamily::PartialMomentsSphere => ("PMM", "PMP"),
        };
        let tag = if nonlinear { tag_m } else { tag_p };
        let index = match self {
            AngularBasis::Monomial1D { order }
            | AngularBasis::Legendre1D { order }
            | AngularBasis::SphericalHarmonics { order } => *order,
            _ => self.dimension(),
        };
        format!("{tag}_{index}")
    }
}

/// A moment vector paired with the basis it was taken against.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentVector {
    values: Vec<f64>,
    basis: AngularBasis,
}

impl MomentVector {
    pub fn new(values: Vec<f64>, basis: AngularBasis) -> Result<Self> {
        if values.len() != basis.dimension() {
            return Err(Error::invalid(format!(
                "moment vector has length {} but the basis has dimension {}",
                values.len(),
                basis.dimension()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("moment vector contains non-finite entries"));
        }
        Ok(Self { values, basis })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn basis(&self) -> &AngularBasis {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Local particle density `ρ(u)`.
    pub fn density(&self) -> f64 {
        self.basis.density(&self.values)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            basis: self.basis.clone(),
        }
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Source spans for [`span_change_of_basis`].
#[derive(Clone, Debug, PartialEq)]
pub enum SpanBasis {
    /// Full moments of order one, `(1, μ)`.
    FullFirstOrder,
    /// First-order mixed moments `(1, 1_[0,1] μ, 1_[-1,0] μ)`.
    MixedFirstOrder,
    /// Any basis, mapped onto itself.
    Exact(AngularBasis),
}

impl SpanBasis {
    pub fn evaluate(&self, mu: f64) -> Result<Vec<f64>> {
        match self {
            SpanBasis::FullFirstOrder => Ok(vec![1.0, mu]),
            SpanBasis::MixedFirstOrder => Ok(vec![
                1.0,
                if mu >= 0.0 { mu } else { 0.0 },
                if mu <= 0.0 { mu } else { 0.0 },
            ]),
            SpanBasis::Exact(b) => b.evaluate(&Direction::Slab(mu)),
        }
    }
}

/// Matrix `T` with `b_from(μ) = T · b_to(μ)` for the supported equivalent
/// pairs: full first-order moments against two hat functions on `(-1, 1)`,
/// mixed first-order moments against three hat functions on `(-1, 0, 1)`,
/// and any basis against itself.
pub fn span_change_of_basis(from: &SpanBasis, to: &AngularBasis) -> Result<DMatrix<f64>> {
    let hat_nodes = match to {
        AngularBasis::HatFunctions1D(p) => Some(p.nodes()),
        _ => None,
    };
    match (from, hat_nodes) {
        (SpanBasis::FullFirstOrder, Some(nodes)) if nodes == [-1.0, 1.0] => {
            Ok(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, -1.0, 1.0]))
        }
        (SpanBasis::MixedFirstOrder, Some(nodes)) if nodes == [-1.0, 0.0, 1.0] => Ok(DMatrix::from_row_slice(
            3,
            3,
            &[1.0, 1.0, 1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0],
        )),
        (SpanBasis::Exact(b), _) if b == to => Ok(DMatrix::identity(to.dimension(), to.dimension())),
        _ => Err(Error::Unsupported(format!(
            "no change of basis from {from:?} to {}",
            to.model_name(true)
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;

    #[test]
    fn dimensions() {
        assert_eq!(AngularBasis::partial_equidistant(4).unwrap().dimension(), 8);
        assert_eq!(AngularBasis::hat_sphere(1).dimension(), 18);
        assert_eq!(AngularBasis::partial_sphere(0).dimension(), 32);
        assert_eq!(AngularBasis::hat_equidistant(4).unwrap().dimension(), 5);
        assert_eq!(AngularBasis::SphericalHarmonics { order: 2 }.dimension(), 9);
        assert_eq!(AngularBasis::Legendre1D { order: 3 }.dimension(), 4);
    }

    #[test]
    fn evaluate_examples() {
        let hat = AngularBasis::hat_equidistant(2).unwrap();
        assert_eq!(hat.evaluate(&Direction::Slab(0.0)).unwrap(), vec![0.0, 1.0, 0.0]);
        let mono = AngularBasis::Monomial1D { order: 2 };
        assert_eq!(mono.evaluate(&Direction::Slab(0.5)).unwrap(), vec![1.0, 0.5, 0.25]);
        assert!(hat.evaluate(&Direction::Slab(1.5)).is_err());
        assert!(hat.evaluate(&Direction::Sphere(Vec3::x())).is_err());

        let pm = AngularBasis::partial_sphere(0);
        let omega = Vec3::repeat(1.0 / 3f64.sqrt());
        let v = pm.evaluate(&Direction::Sphere(omega)).unwrap();
        assert_eq!(&v[..4], &[1.0, omega.x, omega.y, omega.z]);
        assert!(v[4..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn harmonics_order_zero() {
        let sh = AngularBasis::SphericalHarmonics { order: 0 };
        let v = sh.evaluate(&Direction::Sphere(Vec3::new(0.0, 0.6, 0.8))).unwrap();
        assert!((v[0] - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-16);
        assert_eq!(
            AngularBasis::SphericalHarmonics { order: 2 }
                .evaluate(&Direction::Sphere(Vec3::z()))
                .unwrap()
                .len(),
            9
        );
    }

    #[test]
    fn isotropic_moments() {
        assert_eq!(
            AngularBasis::Legendre1D { order: 2 }.isotropic_moment().values(),
            &[2.0, 0.0, 0.0]
        );
        assert_eq!(
            AngularBasis::hat_equidistant(2).unwrap().isotropic_moment().values(),
            &[0.5, 1.0, 0.5]
        );
        let pm = AngularBasis::partial_sphere(0).isotropic_moment();
        for t in 0..8 {
            assert!((pm.values()[4 * t] - PI / 2.0).abs() < 1e-14);
        }
        let hs = AngularBasis::hat_sphere(0).isotropic_moment();
        let total: f64 = hs.values().iter().sum();
        assert!((total - 4.0 * PI).abs() < 1e-10);
        for v in hs.values() {
            assert!((v - 4.0 * PI / 6.0).abs() < 1e-10, "{v} {}", 4.0 * PI / 6.0);
        }
    }

    #[test]
    fn change_of_basis_examples() {
        let h2 = AngularBasis::HatFunctions1D(Partition1D::new(vec![-1.0, 1.0]).unwrap());
        let t = span_change_of_basis(&SpanBasis::FullFirstOrder, &h2).unwrap();
        assert_eq!(t, DMatrix::from_row_slice(2, 2, &[1.0, 1.0, -1.0, 1.0]));
        let h3 = AngularBasis::hat_equidistant(2).unwrap();
        let t = span_change_of_basis(&SpanBasis::MixedFirstOrder, &h3).unwrap();
        for i in 0..=20 {
            let mu = -1.0 + 0.1 * i as f64;
            let lhs = SpanBasis::MixedFirstOrder.evaluate(mu).unwrap();
            let rhs = &t * nalgebra::DVector::from_vec(h3.evaluate(&Direction::Slab(mu)).unwrap());
            for k in 0..3 {
                assert!((lhs[k] - rhs[k]).abs() < 1e-12);
            }
        }
        let id = span_change_of_basis(&SpanBasis::Exact(h3.clone()), &h3).unwrap();
        assert_eq!(id, DMatrix::identity(3, 3));
        assert!(span_change_of_basis(&SpanBasis::FullFirstOrder, &h3).is_err());
    }

    #[test]
    fn model_names() {
        assert_eq!(AngularBasis::hat_equidistant(8).unwrap().model_name(true), "HFM_9");
        assert_eq!(AngularBasis::partial_equidistant(8).unwrap().model_name(false), "PMP_16");
        assert_eq!(AngularBasis::Legendre1D { order: 3 }.model_name(true), "M_3");
        assert_eq!(AngularBasis::SphericalHarmonics { order: 2 }.model_name(false), "P_2");
    }

    #[test]
    fn moment_vector_rejects_wrong_length() {
        let b = AngularBasis::Legendre1D { order: 2 };
        assert!(MomentVector::new(vec![1.0, 0.0], b.clone()).is_err());
        assert!(MomentVector::new(vec![1.0, f64::NAN, 0.0], b).is_err());
    }
}
