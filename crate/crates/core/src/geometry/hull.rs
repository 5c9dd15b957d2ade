//! Convex hull of a small 3D point set as a list of facet halfspaces.

use std::collections::HashSet;

use super::Vec3;

#[derive(Clone, Debug)]
struct Facet {
    normal: Vec3,
    offset: f64,
}

#[derive(Clone, Debug)]
enum Shape {
    Empty,
    Point(Vec3),
    Segment(Vec3, Vec3),
    /// Coplanar set: plane normal/offset plus in-plane edge halfspaces.
    Polygon { normal: Vec3, offset: f64, edges: Vec<Facet> },
    Polytope(Vec<Facet>),
}

/// Convex hull of a point set, answering halfspace membership queries.
#[derive(Clone, Debug)]
pub struct ConvexHull {
    shape: Shape,
    scale: f64,
}

impl ConvexHull {
    pub fn new(points: &[Vec3]) -> Self {
        let scale = points.iter().map(|p| p.amax()).fold(1.0_f64, f64::max);
        let eps = 1e-13 * scale;
        let shape = match points.len() {
            0 => Shape::Empty,
            _ => build(points, eps),
        };
        Self { shape, scale }
    }

    /// Number of facets of a full-dimensional hull.
    pub fn facet_count(&self) -> usize {
        match &self.shape {
            Shape::Polytope(f) => f.len(),
            _ => 0,
        }
    }

    /// Halfspace membership with an absolute slack (scaled by the point
    /// cloud's extent).
    pub fn contains(&self, p: Vec3, slack: f64) -> bool {
        let tol = slack * self.scale;
        match &self.shape {
            Shape::Empty => false,
            Shape::Point(q) => (p - q).norm() <= tol,
            Shape::Segment(a, b) => {
                let d = b - a;
                let t = ((p - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
                (a + d * t - p).norm() <= tol
            }
            Shape::Polygon {
                normal,
                offset,
                edges,
            } => {
                (normal.dot(&p) - offset).abs() <= tol
                    && edges.iter().all(|f| f.normal.dot(&p) <= f.offset + tol)
            }
            Shape::Polytope(facets) => facets.iter().all(|f| f.normal.dot(&p) <= f.offset + tol),
        }
    }
}

fn farthest<F: Fn(&Vec3) -> f64>(points: &[Vec3], f: F) -> (usize, f64) {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| (i, f(p)))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
}

fn build(points: &[Vec3], eps: f64) -> Shape {
    let p0 = points[0];
    let (i1, d1) = farthest(points, |p| (p - p0).norm());
    if d1 <= eps {
        return Shape::Point(p0);
    }
    let (i0, _) = farthest(points, |p| (p - points[i1]).norm());
    let (a, b) = (points[i0], points[i1]);
    let dir = (b - a).normalize();
    let (i2, d2) = farthest(points, |p| (p - a - dir * (p - a).dot(&dir)).norm());
    if d2 <= eps {
        let (lo, _) = farthest(points, |p| -(p - a).dot(&dir));
        let (hi, _) = farthest(points, |p| (p - a).dot(&dir));
        return Shape::Segment(points[lo], points[hi]);
    }
    let c = points[i2];
    let normal = (b - a).cross(&(c - a)).normalize();
    let (i3, d3) = farthest(points, |p| (p - a).dot(&normal).abs());
    if d3 <= eps {
        return planar(points, normal, normal.dot(&a), eps);
    }
    Shape::Polytope(polytope(points, [i0, i1, i2, i3], eps))
}

/// Gift-wrapping hull of coplanar points, stored as in-plane edge halfspaces.
fn planar(points: &[Vec3], normal: Vec3, offset: f64, eps: f64) -> Shape {
    let u = normal.cross(&if normal.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() }).normalize();
    let v = normal.cross(&u);
    let pts: Vec<(f64, f64)> = points.iter().map(|p| (p.dot(&u), p.dot(&v))).collect();
    let start = (0..pts.len())
        .min_by(|&i, &j| pts[i].partial_cmp(&pts[j]).unwrap())
        .unwrap();
    let mut hull = vec![start];
    let mut current = start;
    loop {
        let mut next = if current == 0 { 1 } else { 0 };
        for i in 0..pts.len() {
            if i == current {
                continue;
            }
            let (ox, oy) = pts[current];
            let cross = (pts[next].0 - ox) * (pts[i].1 - oy) - (pts[next].1 - oy) * (pts[i].0 - ox);
            let farther = (pts[i].0 - ox).hypot(pts[i].1 - oy) > (pts[next].0 - ox).hypot(pts[next].1 - oy);
            if cross < -eps || (cross.abs() <= eps && farther) {
                next = i;
            }
        }
        if next == start || hull.len() > pts.len() {
            break;
        }
        hull.push(next);
        current = next;
    }
    let mut edges = Vec::with_capacity(hull.len());
    for k in 0..hull.len() {
        let p = points[hull[k]];
        let q = points[hull[(k + 1) % hull.len()]];
        // counter-clockwise in (u, v) => outward normal is (q - p) x normal
        let n = (q - p).cross(&normal).normalize();
        edges.push(Facet {
            normal: n,
            offset: n.dot(&p),
        });
    }
    Shape::Polygon {
        normal,
        offset,
        edges,
    }
}

/// Incremental hull from an initial tetrahedron.
fn polytope(points: &[Vec3], seed: [usize; 4], eps: f64) -> Vec<Facet> {
    let centroid = seed.iter().map(|&i| points[i]).sum::<Vec3>() / 4.0;
    let plane = |f: &[usize; 3]| -> (Vec3, f64) {
        let (a, b, c) = (points[f[0]], points[f[1]], points[f[2]]);
        let n = (b - a).cross(&(c - a)).normalize();
        (n, n.dot(&a))
    };
    let orient = |mut f: [usize; 3]| -> [usize; 3] {
        let (n, d) = plane(&f);
        if n.dot(&centroid) > d {
            f.swap(1, 2);
        }
        f
    };
    let [s0, s1, s2, s3] = seed;
    let mut faces: Vec<[usize; 3]> = vec![
        orient([s0, s1, s2]),
        orient([s0, s1, s3]),
        orient([s0, s2, s3]),
        orient([s1, s2, s3]),
    ];
    let mut planes: Vec<(Vec3, f64)> = faces.iter().map(&plane).collect();

    for (pi, p) in points.iter().enumerate() {
        if seed.contains(&pi) {
            continue;
        }
        let visible: Vec<bool> = planes.iter().map(|(n, d)| n.dot(p) - d > eps).collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut visible_edges: HashSet<(usize, usize)> = HashSet::new();
        for (f, _) in faces.iter().zip(&visible).filter(|(_, &v)| v) {
            for k in 0..3 {
                visible_edges.insert((f[k], f[(k + 1) % 3]));
            }
        }
        let horizon: Vec<(usize, usize)> = visible_edges
            .iter()
            .filter(|&&(a, b)| !visible_edges.contains(&(b, a)))
            .copied()
            .collect();
        let mut kept_faces = Vec::with_capacity(faces.len());
        let mut kept_planes = Vec::with_capacity(faces.len());
        for ((f, pl), v) in faces.iter().zip(&planes).zip(&visible) {
            if !v {
                kept_faces.push(*f);
                kept_planes.push(*pl);
            }
        }
        for (a, b) in horizon {
            let f = [a, b, pi];
            kept_planes.push(plane(&f));
            kept_faces.push(f);
        }
        faces = kept_faces;
        planes = kept_planes;
    }
    planes
        .into_iter()
        .map(|(normal, offset)| Facet { normal, offset })
        .collect()
}
