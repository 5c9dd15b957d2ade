use proptest::prelude::*;

use pwl_moments::basis::{AngularBasis, MomentVector};
use pwl_moments::geometry::{Direction, SphericalTriangulation, Vec3};
use pwl_moments::quadrature::QuadratureRule;
use pwl_moments::realizability::{check, check_pm_3d, positive_blocks, Atom, AtomicDensity, Status};

fn monomial(values: Vec<f64>) -> MomentVector {
    let order = values.len() - 1;
    MomentVector::new(values, AngularBasis::Monomial1D { order }).unwrap()
}

#[test]
fn full_moment_oracles() {
    assert_eq!(check(&monomial(vec![1.0, 0.5])).unwrap().status, Status::StrictlyRealizable);
    let v = check(&monomial(vec![1.0, 1.0])).unwrap();
    assert_eq!(v.status, Status::BoundaryRealizable);
    assert_eq!(v.rank, Some(1));
    let atoms = v.witness.unwrap().atoms;
    assert_eq!(atoms.len(), 1);
    assert!((atoms[0].location.slab().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(check(&monomial(vec![1.0, 0.0, 1.0 / 3.0])).unwrap().status, Status::StrictlyRealizable);
    assert_eq!(check(&monomial(vec![1.0, 1.1])).unwrap().status, Status::NotRealizable);
}

#[test]
fn block_oracles() {
    let b = positive_blocks(&[0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0]).unwrap();
    assert_eq!(b.iter().map(|b| b.order()).collect::<Vec<_>>(), vec![2, 1, 2]);
    assert_eq!(positive_blocks(&[1.0; 5]).unwrap().len(), 1);
    assert!(positive_blocks(&[0.0; 4]).unwrap().is_empty());
    assert!(positive_blocks(&[1.0, -1.0]).is_err());
}

#[test]
fn hat_oracles() {
    let basis = AngularBasis::hat_equidistant(7).unwrap();
    let u = vec![0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0];
    let v = check(&MomentVector::new(u.clone(), basis.clone()).unwrap()).unwrap();
    assert_eq!(v.status, Status::BoundaryRealizable);
    assert_eq!(v.rank, Some(3));
    assert!(v.witness.unwrap().reproduces(&basis, &u));
    let mut neg = u.clone();
    neg[2] = -1e-3;
    assert_eq!(check(&MomentVector::new(neg, basis.clone()).unwrap()).unwrap().status, Status::NotRealizable);
    let iso = basis.isotropic_moment();
    let v = check(&iso).unwrap();
    assert_eq!(v.status, Status::StrictlyRealizable);
    assert!(v.witness.unwrap().reproduces(&basis, iso.values()));
}

#[test]
fn pm_oracles() {
    let basis = AngularBasis::partial_equidistant(2).unwrap();
    let pm = |u: [f64; 4]| check(&MomentVector::new(u.to_vec(), basis.clone()).unwrap()).unwrap();
    assert_eq!(pm([1.0, -0.5, 1.0, 0.5]).status, Status::StrictlyRealizable);
    assert_eq!(pm([1.0, -0.5, 1.0, 1.2]).status, Status::NotRealizable);
    let v = pm([2.0, 0.0, 1.0, 0.5]);
    assert_eq!(v.status, Status::BoundaryRealizable);
    let w = v.witness.unwrap();
    assert_eq!(w.atoms[0].location.slab(), Some(0.0));
    assert_eq!(w.atoms[0].weight, 2.0);
}

#[test]
fn pm_3d_oracles() {
    let mesh = SphericalTriangulation::octants();
    let tri = mesh.triangle(0);
    let c = (tri.vertices().iter().sum::<Vec3>()).normalize();
    let v = check_pm_3d([1.0, c.x, c.y, c.z], &tri, 0).unwrap();
    assert_eq!(v.status, Status::BoundaryRealizable);
    assert_eq!(v.witness.unwrap().len(), 1);

    let m = 0.9 * c;
    let v = check_pm_3d([1.0, m.x, m.y, m.z], &tri, 0).unwrap();
    assert_eq!(v.status, Status::StrictlyRealizable);
    let w = v.witness.unwrap();
    let mut sum = [0.0; 4];
    for a in &w.atoms {
        let x = a.location.sphere().unwrap();
        sum[0] += a.weight;
        for k in 0..3 {
            sum[k + 1] += a.weight * x[k];
        }
    }
    for (s, u) in sum.iter().zip([1.0, m.x, m.y, m.z]) {
        assert!((s - u).abs() < 1e-12);
    }
    assert_eq!(check_pm_3d([1.0, -0.5, 0.2, 0.2], &tri, 0).unwrap().status, Status::NotRealizable);
    assert!(check_pm_3d([-1.0, 0.0, 0.0, 0.0], &tri, 0).is_err());
}

#[test]
fn numerical_node_mean_is_realizable() {
    let basis = AngularBasis::partial_sphere(0);
    let rule = QuadratureRule::for_basis(&basis, 2, 4).unwrap();
    let mut u = vec![0.0; 32];
    for (x, &c) in rule.nodes().iter().zip(rule.cells()) {
        let x = x.sphere().unwrap();
        u[4 * c] += 1.0;
        for k in 0..3 {
            u[4 * c + 1 + k] += x[k];
        }
    }
    let mv = MomentVector::new(u, basis).unwrap();
    assert!(pwl_moments::realizability::numerically_realizable(&mv, &rule, false).unwrap().realizable);
}

#[test]
fn spherical_harmonics_unsupported() {
    let u = AngularBasis::SphericalHarmonics { order: 1 }.isotropic_moment();
    assert!(check(&u).is_err());
}

fn atomic(basis: &AngularBasis, atoms: &[(f64, f64)]) -> Vec<f64> {
    let atoms = atoms
        .iter()
        .map(|&(w, mu)| Atom {
            weight: w,
            location: Direction::Slab(mu),
            cell: basis.locate(&Direction::Slab(mu)).unwrap(),
        })
        .collect();
    AtomicDensity { atoms }.moments(basis).unwrap()
}

proptest! {
    #[test]
    fn atomic_densities_are_realizable(
        atoms in prop::collection::vec((0.01..1.0f64, -1.0..=1.0f64), 1..8),
        which in 0usize..4,
    ) {
        let basis = match which {
            0 => AngularBasis::Legendre1D { order: 5 },
            1 => AngularBasis::Monomial1D { order: 4 },
            2 => AngularBasis::hat_equidistant(6).unwrap(),
            _ => AngularBasis::partial_equidistant(3).unwrap(),
        };
        let u = atomic(&basis, &atoms);
        let v = check(&MomentVector::new(u.clone(), basis.clone()).unwrap()).unwrap();
        prop_assert!(v.is_realizable(false), "{}", v.status);
        if v.status == Status::StrictlyRealizable {
            prop_assert!(v.is_realizable(true));
        }
        if let Some(w) = &v.witness {
            prop_assert!(w.reproduces(&basis, &u));
        }
        for c in [1e-6, 1e6] {
            let s = check(&MomentVector::new(u.iter().map(|x| c * x).collect(), basis.clone()).unwrap()).unwrap();
            prop_assert_eq!(s.status, v.status);
        }
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        let s = check(&MomentVector::new(neg, basis.clone()).unwrap()).unwrap();
        prop_assert_eq!(s.status, Status::NotRealizable);
    }

    #[test]
    fn sums_stay_realizable(
        a in prop::collection::vec((0.01..1.0f64, -1.0..=1.0f64), 1..4),
        b in prop::collection::vec((0.01..1.0f64, -1.0..=1.0f64), 1..4),
    ) {
        let basis = AngularBasis::Legendre1D { order: 6 };
        let u: Vec<f64> = atomic(&basis, &a).iter().zip(atomic(&basis, &b)).map(|(x, y)| x + y).collect();
        prop_assert!(check(&MomentVector::new(u, basis).unwrap()).unwrap().is_realizable(false));
    }
}
