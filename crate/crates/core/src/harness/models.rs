//! Model families of a study and their index sequences.

use std::fmt;
use std::str::FromStr;

use crate::basis::AngularBasis;
use crate::closure::Entropy;
use crate::error::{Error, Result};
use crate::geometry::Geometry;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Legendre polynomials in slab geometry, real spherical harmonics on the sphere.
    Full,
    Hat,
    Partial,
}

/// A model family (`M`, `P`, `HFM`, `HFP`, `PMM`, `PMP`) with an optional
/// explicit index list. Indices are the order `N` for full-moment models
/// and the number of moments `n` for piecewise models.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Closed with the linear (quadratic entropy) closure.
    pub linear: bool,
    pub indices: Option<Vec<usize>>,
}

fn sphere_hat_level(n: usize) -> Option<usize> {
    (0..8).find(|&r| 4usize.pow(r as u32 + 1) + 2 == n)
}

fn sphere_pm_level(n: usize) -> Option<usize> {
    (0..8).find(|&r| 2 * 4usize.pow(r as u32 + 2) == n)
}

impl ModelSpec {
    pub fn new(kind: ModelKind, linear: bool) -> Self {
        Self {
            kind,
            linear,
            indices: None,
        }
    }

    pub fn with_indices(mut self, indices: Vec<usize>) -> Self {
        self.indices = Some(indices);
        self
    }

    /// The six families with default sequences.
    pub fn all() -> Vec<ModelSpec> {
        [ModelKind::Full, ModelKind::Hat, ModelKind::Partial]
            .into_iter()
            .flat_map(|k| [ModelSpec::new(k, false), ModelSpec::new(k, true)])
            .collect()
    }

    pub fn tag(&self) -> &'static str {
        match (self.kind, self.linear) {
            (ModelKind::Full, false) => "M",
            (ModelKind::Full, true) => "P",
            (ModelKind::Hat, false) => "HFM",
            (ModelKind::Hat, true) => "HFP",
            (ModelKind::Partial, false) => "PMM",
            (ModelKind::Partial, true) => "PMP",
        }
    }

    /// Entropy actually used to close this model.
    pub fn closure_entropy(&self, entropy: Entropy) -> Entropy {
        if self.linear {
            Entropy::Quadratic
        } else {
            entropy
        }
    }

    pub fn default_indices(&self, geometry: Geometry) -> Vec<usize> {
        match (self.kind, geometry) {
            (ModelKind::Full, Geometry::Slab) => vec![1, 2, 3, 4, 5, 6, 7, 8, 16, 32, 64],
            (ModelKind::Hat, Geometry::Slab) => vec![3, 4, 5, 8, 9, 16, 17, 32, 33, 64, 65],
            (ModelKind::Partial, Geometry::Slab) => vec![2, 4, 6, 8, 14, 16, 30, 32, 62, 64],
            (ModelKind::Full, Geometry::Sphere) => vec![1, 2, 3, 4, 5, 6],
            (ModelKind::Hat, Geometry::Sphere) => vec![6, 18, 66],
            (ModelKind::Partial, Geometry::Sphere) => vec![32, 128, 512],
        }
    }

    /// Index sequence for `geometry`, restricted to at most `nmax` moments.
    pub fn sequence(&self, geometry: Geometry, nmax: Option<usize>) -> Result<Vec<usize>> {
        let indices = self
            .indices
            .clone()
            .unwrap_or_else(|| self.default_indices(geometry));
        let mut out = Vec::new();
        for i in indices {
            let n = self.basis(geometry, i)?.dimension();
            if nmax.is_none_or(|m| n <= m) {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Basis of the model with index `index` in `geometry`.
    pub fn basis(&self, geometry: Geometry, index: usize) -> Result<AngularBasis> {
        let bad = || Error::invalid(format!("{} has no {geometry:?} model with index {index}", self.tag()));
        match (self.kind, geometry) {
            (ModelKind::Full, Geometry::Slab) => Ok(AngularBasis::Legendre1D { order: index }),
            (ModelKind::Full, Geometry::Sphere) => Ok(AngularBasis::SphericalHarmonics { order: index }),
            (ModelKind::Hat, Geometry::Slab) if index >= 2 => AngularBasis::hat_equidistant(index - 1),
            (ModelKind::Partial, Geometry::Slab) if index >= 2 && index.is_multiple_of(2) => {
                AngularBasis::partial_equidistant(index / 2)
            }
            (ModelKind::Hat, Geometry::Sphere) => sphere_hat_level(index).map(AngularBasis::hat_sphere).ok_or_else(bad),
            (ModelKind::Partial, Geometry::Sphere) => {
                sphere_pm_level(index).map(AngularBasis::partial_sphere).ok_or_else(bad)
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())?;
        if let Some(ix) = &self.indices {
            let list: Vec<String> = ix.iter().map(|i| i.to_string()).collect();
            write!(f, "[{}]", list.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    /// `HFM` or `HFM[5,9,17]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (tag, list) = match s.split_once('[') {
            Some((t, rest)) => {
                let inner = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Parse(format!("unterminated index list in `{s}`")))?;
                let ix = inner
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad model index `{t}` in `{s}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                (t.trim(), Some(ix))
            }
            None => (s, None),
        };
        let (kind, linear) = match tag.to_ascii_uppercase().as_str() {
            "M" => (ModelKind::Full, false),
            "P" => (ModelKind::Full, true),
            "HFM" => (ModelKind::Hat, false),
            "HFP" => (ModelKind::Hat, true),
            "PMM" => (ModelKind::Partial, false),
            "PMP" => (ModelKind::Partial, true),
            _ => return Err(Error::Parse(format!("unknown model `{tag}`"))),
        };
        Ok(Self {
            kind,
            linear,
            indices: list,
        })
    }
}

/// Parses `M,HFM[5,9],PMM`; `all` selects every family.
pub fn parse_models(s: &str) -> Result<Vec<ModelSpec>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(ModelSpec::all());
    }
    let mut out = Vec::new();
    let (mut depth, mut start) = (0usize, 0usize);
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            ',' | ';' if depth == 0 => {
                if !s[start..i].trim().is_empty() {
                    out.push(s[start..i].parse()?);
                }
                start = i + 1;
            }
            _ => {}
        }
    }
    if !s[start..].trim().is_empty() {
        out.push(s[start..].parse()?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_lists() {
        let m = parse_models("M, HFM[5,9,17];pmp").unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m[0].tag(), "M");
        assert_eq!(m[1].indices, Some(vec![5, 9, 17]));
        assert_eq!(m[2].tag(), "PMP");
        assert_eq!(m[1].to_string(), "HFM[5,9,17]");
        assert!(parse_models("XYZ").is_err());
        assert!(parse_models("HFM[5,9").is_err());
        assert_eq!(parse_models("all").unwrap().len(), 6);
    }

    #[test]
    fn bases_match_indices() {
        let hat = ModelSpec::new(ModelKind::Hat, false);
        assert_eq!(hat.basis(Geometry::Slab, 5).unwrap().dimension(), 5);
        assert_eq!(hat.basis(Geometry::Sphere, 18).unwrap().dimension(), 18);
        assert!(hat.basis(Geometry::Sphere, 17).is_err());
        let pm = ModelSpec::new(ModelKind::Partial, true);
        assert_eq!(pm.basis(Geometry::Slab, 8).unwrap().dimension(), 8);
        assert!(pm.basis(Geometry::Slab, 7).is_err());
        assert_eq!(pm.basis(Geometry::Sphere, 128).unwrap().dimension(), 128);
        let m = ModelSpec::new(ModelKind::Full, false);
        assert_eq!(m.basis(Geometry::Sphere, 3).unwrap().dimension(), 16);
        assert_eq!(m.sequence(Geometry::Slab, Some(9)).unwrap(), vec![1, 2, 3, 4, 5, 6, 7, 8]);
        for spec in ModelSpec::all() {
            for g in [Geometry::Slab, Geometry::Sphere] {
                for i in spec.default_indices(g) {
                    let b = spec.basis(g, i).unwrap();
                    if spec.kind != ModelKind::Full {
                        assert_eq!(b.dimension(), i);
                    }
                }
            }
        }
    }
}
