use proptest::prelude::*;

use pwl_moments::geometry::{Direction, Partition1D, SphericalTriangulation, Vec3};
use pwl_moments::quadrature::QuadratureRule;

fn unit(z: f64, phi: f64) -> Vec3 {
    let s = (1.0 - z * z).sqrt();
    Vec3::new(s * phi.cos(), s * phi.sin(), z)
}

#[test]
fn octants_and_levels() {
    for level in 0..4 {
        let t = SphericalTriangulation::with_level(level);
        assert_eq!(t.triangle_count(), 8 * 4usize.pow(level as u32));
        assert_eq!(t.vertex_count(), 4usize.pow(level as u32 + 1) + 2);
        assert!((t.total_area() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}

#[test]
fn refined_children_tile_their_parent() {
    let coarse = SphericalTriangulation::with_level(1);
    let fine = coarse.refine();
    for (i, parent) in coarse.elements().iter().enumerate() {
        let children: f64 = (0..4).map(|c| fine.triangle(4 * i + c).area()).sum();
        assert!((children - parent.area()).abs() < 1e-14);
    }
}

#[test]
fn first_moments_sum_to_zero() {
    let t = SphericalTriangulation::with_level(2);
    let total = t.elements().iter().fold(Vec3::zeros(), |a, e| a + e.first_moment());
    assert!(total.norm() < 1e-13);
    // a single octant: π/4 in every coordinate
    let m = SphericalTriangulation::octants().triangle(0).first_moment();
    for k in 0..3 {
        assert!((m[k] - std::f64::consts::FRAC_PI_4).abs() < 1e-14);
    }
}

#[test]
fn first_moment_matches_quadrature() {
    let mesh = SphericalTriangulation::with_level(1);
    let rule = QuadratureRule::spherical_refined(&mesh, 2, 12).unwrap();
    for (j, tri) in mesh.elements().iter().enumerate() {
        let mut m = Vec3::zeros();
        for ((x, w), &c) in rule.nodes().iter().zip(rule.weights()).zip(rule.cells()) {
            if c == j {
                m += *w * x.sphere().unwrap();
            }
        }
        assert!((m - tri.first_moment()).norm() < 1e-9);
    }
}

#[test]
fn mesh_text_round_trip() {
    let t = SphericalTriangulation::with_level(2);
    let text = t.to_text();
    assert!(text.starts_with("vertices 66 triangles 128 level 2\n"));
    let back = SphericalTriangulation::from_text(&text).unwrap();
    assert_eq!(back.triangles(), t.triangles());
    assert_eq!(back.level(), 2);
    for (a, b) in back.vertices().iter().zip(t.vertices()) {
        assert!((a - b).norm() < 1e-15);
    }
    assert!(SphericalTriangulation::from_text("vertices 2 triangles 0 level 0\n1 0 0\n").is_err());
}

#[test]
fn partition_rejects_bad_nodes() {
    assert!(Partition1D::new(vec![-1.0, 0.5, 0.2, 1.0]).is_err());
    assert!(Partition1D::new(vec![-1.0, 0.9]).is_err());
    assert!(Partition1D::equidistant(0).is_err());
}

proptest! {
    #[test]
    fn located_triangle_contains_point(z in -1.0..1.0f64, phi in 0.0..std::f64::consts::TAU, level in 0usize..4) {
        let t = SphericalTriangulation::with_level(level);
        let w = unit(z, phi);
        let j = t.locate(w).unwrap();
        prop_assert!(t.triangle(j).contains(w, 1e-12));
    }

    #[test]
    fn spherical_barycentric_partition_of_unity(z in -1.0..1.0f64, phi in 0.0..std::f64::consts::TAU) {
        let t = SphericalTriangulation::with_level(1);
        let w = unit(z, phi);
        let tri = t.triangle(t.locate(w).unwrap());
        let l = tri.spherical_barycentric(w).unwrap();
        prop_assert!((l.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(l.iter().all(|&x| x >= -1e-12));
    }

    #[test]
    fn planar_barycentric_reconstructs(a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let tri = SphericalTriangulation::octants().triangle(0);
        let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
        let [p, q, r] = tri.vertices();
        let x = p * (1.0 - a - b) + q * a + r * b;
        let l = tri.planar_barycentric(x);
        prop_assert!((l[0] - (1.0 - a - b)).abs() < 1e-13);
        prop_assert!((l[1] - a).abs() < 1e-13 && (l[2] - b).abs() < 1e-13);
    }

    #[test]
    fn partition_locate(k in 1usize..40, mu in -1.0..=1.0f64) {
        let p = Partition1D::equidistant(k).unwrap();
        let j = p.locate(mu).unwrap();
        prop_assert!(p.contains(j, mu));
        prop_assert!(Direction::Slab(mu).slab() == Some(mu));
    }
}
