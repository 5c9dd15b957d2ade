//! Angular meshes: interval partitions of `[-1, 1]` and spherical
//! triangulations of the unit sphere.

mod hull;
mod partition;
mod sphere;

pub use hull::ConvexHull;
pub use partition::Partition1D;
pub use sphere::{project_to_sphere, SphericalTriangle, SphericalTriangulation};

use nalgebra::Vector3;

pub type Vec3 = Vector3<f64>;

/// Slack used for closed-set membership tests on the angular domain.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// A point of the angular domain: a direction cosine in slab geometry or a
/// unit vector on the sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Direction {
    Slab(f64),
    Sphere(Vec3),
}

impl Direction {
    pub fn slab(&self) -> Option<f64> {
        match *self {
            Direction::Slab(mu) => Some(mu),
            Direction::Sphere(_) => None,
        }
    }

    pub fn sphere(&self) -> Option<Vec3> {
        match *self {
            Direction::Sphere(v) => Some(v),
            Direction::Slab(_) => None,
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Slab(mu) => write!(f, "mu={mu}"),
            Direction::Sphere(v) => write!(f, "({}, {}, {})", v.x, v.y, v.z),
        }
    }
}

/// Slab geometry or the full sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    Slab,
    Sphere,
}

impl Geometry {
    /// Measure of the angular domain: 2 for `[-1, 1]`, 4π for the sphere.
    pub fn measure(self) -> f64 {
        match self {
            Geometry::Slab => 2.0,
            Geometry::Sphere => 4.0 * std::f64::consts::PI,
        }
    }
}
