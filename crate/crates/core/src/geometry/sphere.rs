use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::{Vec3, MEMBERSHIP_TOL};

const UNIT_TOL: f64 = 1e-14;

/// Radial projection `x / |x|` onto the unit sphere.
pub fn project_to_sphere(x: Vec3) -> Result<Vec3> {
    let norm = x.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(x / norm)
}

/// A spherical triangle, stored by its three unit vertices.
///
/// The flat triangle spanned by the same vertices (`K`) provides the plane
/// used for barycentric coordinates and hull tests; its unit normal is always
/// oriented away from the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalTriangle {
    a: Vec3,
    b: Vec3,
    c: Vec3,
    normal: Vec3,
    offset: f64,
}

impl SphericalTriangle {
    pub fn new(a: Vec3, b: Vec3, c: Vec3) -> Result<Self> {
        for v in [a, b, c] {
            if (v.norm() - 1.0).abs() > UNIT_TOL {
                return Err(Error::invalid(format!(
                    "triangle vertex {v:?} is not a unit vector"
                )));
            }
        }
        let cross = (b - a).cross(&(c - a));
        let len = cross.norm();
        if !(len > 1e-15) {
            return Err(Error::invalid("degenerate spherical triangle"));
        }
        let mut normal = cross / len;
        let mut offset = normal.dot(&a);
        if offset < 0.0 {
            normal = -normal;
            offset = -offset;
        }
        if !(offset > 0.0) {
            return Err(Error::invalid(
                "triangle plane passes through the origin",
            ));
        }
        Ok(Self {
            a,
            b,
            c,
            normal,
            offset,
        })
    }

    pub fn vertices(&self) -> [Vec3; 3] {
        [self.a, self.b, self.c]
    }

    /// Unit normal of the flat triangle, pointing away from the origin.
    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    /// Distance of the flat triangle's plane from the origin.
    pub fn plane_offset(&self) -> f64 {
        self.offset
    }

    pub fn flat_area(&self) -> f64 {
        0.5 * (self.b - self.a).cross(&(self.c - self.a)).norm()
    }

    /// Spherical excess via the Van Oosterom–Strackee formula.
    pub fn area(&self) -> f64 {
        let num = self.a.dot(&self.b.cross(&self.c)).abs();
        let den = 1.0 + self.a.dot(&self.b) + self.b.dot(&self.c) + self.c.dot(&self.a);
        2.0 * num.atan2(den)
    }

    /// `∫ Ω dΩ` over the spherical triangle: half the sum over edges of arc
    /// length times the unit normal of the edge's great-circle plane.
    pub fn first_moment(&self) -> Vec3 {
        let verts = self.oriented_vertices();
        let mut acc = Vec3::zeros();
        for i in 0..3 {
            let p = verts[i];
            let q = verts[(i + 1) % 3];
            let cross = p.cross(&q);
            let len = cross.norm();
            if len == 0.0 {
                continue;
            }
            let theta = len.atan2(p.dot(&q));
            acc += cross * (theta / len);
        }
        0.5 * acc
    }

    /// Vertices ordered counter-clockwise when seen from outside.
    fn oriented_vertices(&self) -> [Vec3; 3] {
        if (self.b - self.a).cross(&(self.c - self.a)).dot(&self.normal) >= 0.0 {
            [self.a, self.b, self.c]
        } else {
            [self.a, self.c, self.b]
        }
    }

    /// Planar barycentric coordinates of `p` (assumed in the plane of `K`).
    pub fn planar_barycentric(&self, p: Vec3) -> [f64; 3] {
        let n = self.normal;
        let total = (self.b - self.a).cross(&(self.c - self.a)).dot(&n);
        let la = (self.b - p).cross(&(self.c - p)).dot(&n) / total;
        let lb = (self.c - p).cross(&(self.a - p)).dot(&n) / total;
        let lc = (self.a - p).cross(&(self.b - p)).dot(&n) / total;
        [la, lb, lc]
    }

    /// Intersection of the ray through `omega` with the plane of `K`, if the
    /// ray hits the plane on the far side of the origin.
    pub fn ray_plane(&self, omega: Vec3) -> Option<Vec3> {
        let denom = self.normal.dot(&omega);
        if denom <= 0.0 {
            return None;
        }
        Some(omega * (self.offset / denom))
    }

    /// Closed membership of a direction in the spherical triangle.
    pub fn contains(&self, omega: Vec3, tol: f64) -> bool {
        match self.ray_plane(omega) {
            None => false,
            Some(p) => self.planar_barycentric(p).iter().all(|&l| l >= -tol),
        }
    }

    /// Barycentric-coordinate basis values at a direction in the triangle.
    ///
    /// Uses planar barycentric coordinates of the ray-plane intersection with
    /// the flat triangle: a partition of unity with the Lagrange property and
    /// non-negative values on the closed triangle.
    pub fn spherical_barycentric(&self, omega: Vec3) -> Result<[f64; 3]> {
        if (omega.norm() - 1.0).abs() > MEMBERSHIP_TOL {
            return Err(Error::OffDomain(format!("{omega:?} is not a unit vector")));
        }
        let p = self
            .ray_plane(omega)
            .ok_or_else(|| Error::OffDomain(format!("{omega:?} outside triangle")))?;
        let mut lam = self.planar_barycentric(p);
        if lam.iter().any(|&l| l < -MEMBERSHIP_TOL) {
            return Err(Error::OffDomain(format!("{omega:?} outside triangle")));
        }
        for l in lam.iter_mut() {
            *l = l.max(0.0);
        }
        let sum: f64 = lam.iter().sum();
        for l in lam.iter_mut() {
            *l /= sum;
        }
        Ok(lam)
    }

    /// Membership of `p` in the convex hull of the spherical triangle.
    ///
    /// The hull is bounded by the spherical cap part and the flat triangle:
    /// `p` is inside iff its radial projection lies in the spherical triangle,
    /// `|p| <= 1` and `n·p >= n·A`.
    pub fn in_hull(&self, p: Vec3, strict: bool) -> bool {
        let norm = p.norm();
        if !(norm > 0.0) {
            return false;
        }
        let dir = p / norm;
        let height = self.normal.dot(&p);
        if strict {
            let Some(q) = self.ray_plane(dir) else {
                return false;
            };
            self.planar_barycentric(q).iter().all(|&l| l > 0.0)
                && norm < 1.0
                && height > self.offset
        } else {
            self.contains(dir, MEMBERSHIP_TOL)
                && norm <= 1.0 + MEMBERSHIP_TOL
                && height >= self.offset - MEMBERSHIP_TOL
        }
    }
}

/// Conforming triangulation of the unit sphere obtained by dyadic refinement
/// of the eight octants.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalTriangulation {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    level: usize,
    elements: Vec<SphericalTriangle>,
}

impl SphericalTriangulation {
    /// The eight octant triangles on the vertices `±e_x, ±e_y, ±e_z`
    /// (refinement level 0). Triangle 0 is the `(+, +, +)` octant.
    pub fn octants() -> Self {
        let vertices = vec![
            Vec3::x(),
            Vec3::y(),
            Vec3::z(),
            -Vec3::x(),
            -Vec3::y(),
            -Vec3::z(),
        ];
        let axis = |k: usize, positive: bool| if positive { k } else { k + 3 };
        let mut triangles = Vec::with_capacity(8);
        for &sz in &[true, false] {
            for &(sx, sy) in &[(true, true), (false, true), (false, false), (true, false)] {
                let mut t = [axis(0, sx), axis(1, sy), axis(2, sz)];
                let (a, b, c) = (vertices[t[0]], vertices[t[1]], vertices[t[2]]);
                if (b - a).cross(&(c - a)).dot(&a) < 0.0 {
                    t.swap(1, 2);
                }
                triangles.push(t);
            }
        }
        Self::assemble(vertices, triangles, 0).expect("octants are valid")
    }

    fn assemble(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>, level: usize) -> Result<Self> {
        let elements = triangles
            .iter()
            .map(|&[a, b, c]| SphericalTriangle::new(vertices[a], vertices[b], vertices[c]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            vertices,
            triangles,
            level,
            elements,
        })
    }

    /// The octant triangulation refined `level` times.
    pub fn with_level(level: usize) -> Self {
        let mut t = Self::octants();
        for _ in 0..level {
            t = t.refine();
        }
        t
    }

    /// Split every triangle into four at its radially projected edge
    /// midpoints. Child `4i + c` descends from parent `i`.
    pub fn refine(&self) -> Self {
        let mut vertices = self.vertices.clone();
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |i: usize, j: usize, vertices: &mut Vec<Vec3>| -> usize {
            let key = (i.min(j), i.max(j));
            *midpoints.entry(key).or_insert_with(|| {
                let m = (vertices[i] + vertices[j]).normalize();
                vertices.push(m);
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        Self::assemble(vertices, triangles, self.level + 1).expect("refinement keeps triangles valid")
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle(&self, i: usize) -> SphericalTriangle {
        self.elements[i]
    }

    pub fn elements(&self) -> &[SphericalTriangle] {
        &self.elements
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangle_count()).map(|i| self.triangle(i).area()).sum()
    }

    /// Lowest-index closed triangle containing `omega`.
    pub fn locate(&self, omega: Vec3) -> Result<usize> {
        if !((omega.norm() - 1.0).abs() <= MEMBERSHIP_TOL) {
            return Err(Error::OffDomain(format!("{omega:?} is not a unit vector")));
        }
        self.elements
            .iter()
            .position(|t| t.contains(omega, MEMBERSHIP_TOL))
            .ok_or_else(|| Error::OffDomain(format!("{omega:?} not covered")))
    }

    /// Plain-text mesh: a `vertices N triangles M level r` header, then `N`
    /// lines `x y z` and `M` lines of 0-based vertex indices.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "vertices {} triangles {} level {}",
            self.vertex_count(),
            self.triangle_count(),
            self.level
        );
        for v in &self.vertices {
            let _ = writeln!(s, "{} {} {}", v.x, v.y, v.z);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| Error::Parse("empty mesh file".into()))?
            .split_whitespace()
            .collect();
        let bad_header = || Error::Parse("expected `vertices N triangles M level r`".into());
        if header.len() != 6
            || header[0] != "vertices"
            || header[2] != "triangles"
            || header[4] != "level"
        {
            return Err(bad_header());
        }
        let parse_usize = |s: &str| s.parse::<usize>().map_err(|_| bad_header());
        let nv = parse_usize(header[1])?;
        let nt = parse_usize(header[3])?;
        let level = parse_usize(header[5])?;

        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("missing vertex line".into()))?;
            let xs: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("vertex `{line}`: {e}")))?;
            if xs.len() != 3 {
                return Err(Error::Parse(format!("vertex `{line}` needs 3 coordinates")));
            }
            vertices.push(Vec3::new(xs[0], xs[1], xs[2]));
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("missing triangle line".into()))?;
            let ids: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("triangle `{line}`: {e}")))?;
            if ids.len() != 3 || ids.iter().any(|&i| i >= nv) {
                return Err(Error::Parse(format!("triangle `{line}` is invalid")));
            }
            triangles.push([ids[0], ids[1], ids[2]]);
        }
        Self::assemble(vertices, triangles, level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn projection() {
        assert_eq!(project_to_sphere(Vec3::new(2.0, 0.0, 0.0)).unwrap(), Vec3::x());
        let p = project_to_sphere(Vec3::new(1.0, 1.0, 1.0)).unwrap();
        assert!((p - Vec3::repeat(1.0 / 3f64.sqrt())).norm() < 1e-15);
        let u = Vec3::new(0.6, 0.0, 0.8);
        assert!((project_to_sphere(u).unwrap() - u).norm() < 1e-16);
        assert!(matches!(project_to_sphere(Vec3::zeros()), Err(Error::ZeroVector)));
    }

    #[test]
    fn octant_counts_and_area() {
        let t = SphericalTriangulation::octants();
        assert_eq!(t.triangle_count(), 8);
        assert_eq!(t.vertex_count(), 6);
        assert!((t.total_area() - 4.0 * PI).abs() < 1e-12);
        let octant = t.triangle(0);
        assert!((octant.area() - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn refinement_counts() {
        let mut t = SphericalTriangulation::octants();
        for r in 1..=3 {
            t = t.refine();
            assert_eq!(t.level(), r);
            assert_eq!(t.triangle_count(), 2 * 4usize.pow(r as u32 + 1));
            assert_eq!(t.vertex_count(), 4usize.pow(r as u32 + 1) + 2);
            assert!((t.total_area() - 4.0 * PI).abs() < 1e-10);
        }
    }

    #[test]
    fn refinement_is_conforming() {
        let t = SphericalTriangulation::with_level(2);
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in t.triangles() {
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        assert!(edges.values().all(|&c| c == 2));
        for tri in t.triangles() {
            let [a, b, c] = tri.map(|i| t.vertices()[i]);
            assert!((b - a).cross(&(c - a)).dot(&a) > 0.0);
        }
    }

    #[test]
    fn first_moment_of_octant() {
        let t = SphericalTriangulation::octants();
        let m = t.triangle(0).first_moment();
        assert!((m - Vec3::repeat(PI / 4.0)).norm() < 1e-14);
        let total: Vec3 = (0..8).map(|i| t.triangle(i).first_moment()).sum();
        assert!(total.norm() < 1e-14);
    }

    #[test]
    fn barycentric_properties() {
        let tri = SphericalTriangulation::octants().triangle(0);
        let [a, b, c] = tri.vertices();
        assert_eq!(tri.spherical_barycentric(a).unwrap(), [1.0, 0.0, 0.0]);
        let centroid = project_to_sphere(a + b + c).unwrap();
        let lam = tri.spherical_barycentric(centroid).unwrap();
        for l in lam {
            assert!((l - 1.0 / 3.0).abs() < 1e-14);
        }
        assert!(tri.spherical_barycentric(-centroid).is_err());
    }

    #[test]
    fn locate_octant() {
        let t = SphericalTriangulation::octants();
        let omega = Vec3::repeat(1.0 / 3f64.sqrt());
        assert_eq!(t.locate(omega).unwrap(), 0);
        assert!(t.locate(Vec3::new(1.0, 1.0, 0.0)).is_err());
        let j = t.locate(Vec3::new(-0.6, -0.0, -0.8)).unwrap();
        assert!(t.triangle(j).contains(Vec3::new(-0.6, 0.0, -0.8), 1e-12));
    }

    #[test]
    fn hull_examples() {
        let tri = SphericalTriangulation::octants().triangle(0);
        let [a, _, _] = tri.vertices();
        assert!(tri.in_hull(a, false));
        assert!(!tri.in_hull(a, true));
        assert!(!tri.in_hull(Vec3::zeros(), false));
        let inner = Vec3::repeat(0.5);
        assert!(tri.in_hull(inner, true));
        assert!(!tri.in_hull(Vec3::repeat(0.1), false));
    }

    #[test]
    fn mesh_text_round_trip() {
        let t = SphericalTriangulation::with_level(1);
        let text = t.to_text();
        assert!(text.starts_with("vertices 18 triangles 32 level 1\n"));
        let back = SphericalTriangulation::from_text(&text).unwrap();
        assert_eq!(back, t);
        assert!(SphericalTriangulation::from_text("vertices 1 triangles").is_err());
    }
}
