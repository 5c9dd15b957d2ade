//! Prescribed kinetic densities used as approximation targets.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{Direction, Geometry, Vec3};

/// Vacuum particle density `ρ_vac` spread isotropically.
pub const VACUUM_DENSITY: f64 = 1e-8;

/// A strictly positive target density on `[-1, 1]` or the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TestDensity {
    Gauss1D { sigma: f64, mean: f64 },
    Heaviside1D { vacuum: f64 },
    CrossingBeams1D { a: f64 },
    Gauss3D { sigma: f64, mean_x: f64 },
    Square3D { vacuum: f64 },
    CrossingBeams3D { a: f64, vacuum: f64 },
}

impl TestDensity {
    pub const GAUSS_1D: Self = TestDensity::Gauss1D { sigma: 0.5, mean: 0.0 };
    pub const HEAVISIDE_1D: Self = TestDensity::Heaviside1D {
        vacuum: VACUUM_DENSITY / 2.0,
    };
    pub const CROSSING_BEAMS_1D: Self = TestDensity::CrossingBeams1D { a: 1e3 };
    pub const GAUSS_3D: Self = TestDensity::Gauss3D { sigma: 0.5, mean_x: 1.0 };
    pub const SQUARE_3D: Self = TestDensity::Square3D {
        vacuum: VACUUM_DENSITY / (4.0 * PI),
    };
    pub const CROSSING_BEAMS_3D: Self = TestDensity::CrossingBeams3D {
        a: 100.0,
        vacuum: VACUUM_DENSITY / (4.0 * PI),
    };

    /// The six standard test cases.
    pub fn all() -> [TestDensity; 6] {
        [
            Self::GAUSS_1D,
            Self::HEAVISIDE_1D,
            Self::CROSSING_BEAMS_1D,
            Self::GAUSS_3D,
            Self::SQUARE_3D,
            Self::CROSSING_BEAMS_3D,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestDensity::Gauss1D { .. } => "gauss1d",
            TestDensity::Heaviside1D { .. } => "heaviside1d",
            TestDensity::CrossingBeams1D { .. } => "crossingbeams1d",
            TestDensity::Gauss3D { .. } => "gauss3d",
            TestDensity::Square3D { .. } => "square3d",
            TestDensity::CrossingBeams3D { .. } => "crossingbeams3d",
        }
    }

    pub fn geometry(&self) -> Geometry {
        match self {
            TestDensity::Gauss1D { .. } | TestDensity::Heaviside1D { .. } | TestDensity::CrossingBeams1D { .. } => {
                Geometry::Slab
            }
            _ => Geometry::Sphere,
        }
    }

    /// Slab points where the density jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            TestDensity::Heaviside1D { .. } => vec![0.0],
            _ => Vec::new(),
        }
    }

    /// `ψ(x)`; errors if `x` belongs to the other geometry.
    pub fn evaluate(&self, x: &Direction) -> Result<f64> {
        match (self, x) {
            (TestDensity::Gauss1D { sigma, mean }, Direction::Slab(mu)) => {
                let s2 = sigma * sigma;
                Ok((-(mu - mean).powi(2) / (2.0 * s2)).exp() / (2.0 * PI * s2).sqrt())
            }
            (TestDensity::Heaviside1D { vacuum }, Direction::Slab(mu)) => Ok(if *mu < 0.0 { *vacuum } else { 1.0 }),
            (TestDensity::CrossingBeams1D { a }, Direction::Slab(mu)) => {
                Ok((a / PI).sqrt() * ((-a * (mu + 1.0).powi(2)).exp() + (-a * (mu - 0.5).powi(2)).exp()))
            }
            (TestDensity::Gauss3D { sigma, mean_x }, Direction::Sphere(w)) => {
                let s2 = sigma * sigma;
                let norm = 2.0 * PI * s2 * (1.0 - (-2.0 / s2).exp());
                let r2 = (w.x - mean_x).powi(2) + w.y * w.y + w.z * w.z;
                Ok((-r2 / (2.0 * s2)).exp() / norm)
            }
            (TestDensity::Square3D { vacuum }, Direction::Sphere(w)) => {
                Ok(if w.x > 0.0 && w.y.abs() < 0.5 && w.z.abs() < 0.5 {
                    1.0
                } else {
                    *vacuum
                })
            }
            (TestDensity::CrossingBeams3D { a, vacuum }, Direction::Sphere(w)) => {
                let beam = |c: Vec3| (-a * (w - c).norm_squared()).exp();
                let v = a / PI * (beam(Vec3::x()) + beam(Vec3::y()));
                Ok(v.max(*vacuum))
            }
            _ => Err(Error::OffDomain(format!("{x} is not in the domain of {}", self.name()))),
        }
    }
}

impl fmt::Display for TestDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestDensity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        TestDensity::all()
            .into_iter()
            .find(|d| d.name() == key)
            .ok_or_else(|| Error::Parse(format!("unknown density `{s}`")))
    }
}

/// Parses a comma-separated density list; `all` selects every test case.
pub fn parse_densities(s: &str) -> Result<Vec<TestDensity>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(TestDensity::all().to_vec());
    }
    s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for d in TestDensity::all() {
            assert_eq!(d.name().parse::<TestDensity>().unwrap(), d);
        }
        assert_eq!("Crossing-Beams-1D".parse::<TestDensity>().unwrap(), TestDensity::CROSSING_BEAMS_1D);
        assert_eq!(parse_densities("all").unwrap().len(), 6);
        assert!(parse_densities("gauss2d").is_err());
    }

    #[test]
    fn values() {
        let g = TestDensity::GAUSS_1D.evaluate(&Direction::Slab(0.0)).unwrap();
        assert!((g - 1.0 / (2.0 * PI * 0.25).sqrt()).abs() < 1e-15);
        let h = TestDensity::HEAVISIDE_1D;
        assert_eq!(h.evaluate(&Direction::Slab(-0.5)).unwrap(), 5e-9);
        assert_eq!(h.evaluate(&Direction::Slab(0.0)).unwrap(), 1.0);
        let sq = TestDensity::SQUARE_3D;
        assert_eq!(sq.evaluate(&Direction::Sphere(Vec3::x())).unwrap(), 1.0);
        assert_eq!(sq.evaluate(&Direction::Sphere(-Vec3::x())).unwrap(), 1e-8 / (4.0 * PI));
        let cb = TestDensity::CROSSING_BEAMS_3D;
        assert_eq!(cb.evaluate(&Direction::Sphere(-Vec3::z())).unwrap(), 1e-8 / (4.0 * PI));
        assert!(TestDensity::GAUSS_3D.evaluate(&Direction::Slab(0.0)).is_err());
    }
}
