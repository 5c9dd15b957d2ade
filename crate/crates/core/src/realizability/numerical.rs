//! Realizability with respect to a fixed quadrature rule.

use crate::basis::{AngularBasis, MomentVector};
use crate::error::{Error, Result};
use crate::geometry::{ConvexHull, Vec3, MEMBERSHIP_TOL};
use crate::quadrature::QuadratureRule;

use super::{check_hat, check_pm_1d};

/// Outcome of a numerical realizability test. `nodal_density` holds
/// non-negative values `ψ_i` at the rule nodes with `Σ w_i ψ_i b(x_i) = u`
/// when such a density was constructed.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericalVerdict {
    pub realizable: bool,
    pub nodal_density: Option<Vec<f64>>,
}

fn node_index(rule: &QuadratureRule, cell: usize, mu: f64) -> Result<usize> {
    rule.nodes()
        .iter()
        .zip(rule.cells())
        .position(|(x, &c)| c == cell && x.slab() == Some(mu))
        .ok_or_else(|| Error::RuleHypothesis(format!("node {mu} missing from interval {cell}")))
}

fn sphere_node_index(rule: &QuadratureRule, v: Vec3) -> Result<usize> {
    rule.nodes()
        .iter()
        .position(|x| x.sphere().is_some_and(|p| (p - v).norm() <= 1e-14))
        .ok_or_else(|| Error::RuleHypothesis(format!("vertex {v:?} is not a rule node")))
}

/// Whether `u` is a moment vector of a non-negative nodal density on `rule`.
///
/// Slab hat and partial-moment bases need the partition nodes in every
/// adjacent interval's node set; the result then equals the analytic test
/// and a two-nodes-per-interval density is returned. Spherical partial
/// moments are tested against the convex hull of each triangle's nodes.
pub fn numerically_realizable(u: &MomentVector, rule: &QuadratureRule, strict: bool) -> Result<NumericalVerdict> {
    let values = u.values();
    let w = rule.weights();
    match u.basis() {
        AngularBasis::HatFunctions1D(p) => {
            rule.check_partition_nodes(p)?;
            let realizable = check_hat(u)?.is_realizable(strict);
            let density = realizable
                .then(|| -> Result<Vec<f64>> {
                    let mut psi = vec![0.0; rule.len()];
                    for (i, &mu) in p.nodes().iter().enumerate() {
                        let q = node_index(rule, i.saturating_sub(1).min(p.intervals() - 1), mu)?;
                        psi[q] += values[i] / w[q];
                    }
                    Ok(psi)
                })
                .transpose()?;
            Ok(NumericalVerdict {
                realizable,
                nodal_density: density,
            })
        }
        AngularBasis::PartialMoments1D(p) => {
            rule.check_partition_nodes(p)?;
            let realizable = check_pm_1d(u)?.is_realizable(strict);
            let density = realizable
                .then(|| -> Result<Vec<f64>> {
                    let mut psi = vec![0.0; rule.len()];
                    for j in 0..p.intervals() {
                        let (a, b) = p.interval(j);
                        let h = b - a;
                        let (u0, u1) = (values[2 * j], values[2 * j + 1]);
                        let left = ((b * u0 - u1) / h).max(0.0);
                        let right = ((u1 - a * u0) / h).max(0.0);
                        let qa = node_index(rule, j, a)?;
                        let qb = node_index(rule, j, b)?;
                        psi[qa] += left / w[qa];
                        psi[qb] += right / w[qb];
                    }
                    Ok(psi)
                })
                .transpose()?;
            Ok(NumericalVerdict {
                realizable,
                nodal_density: density,
            })
        }
        AngularBasis::HatFunctionsSphere(mesh) => {
            let nodes: Vec<usize> = mesh
                .vertices()
                .iter()
                .map(|&v| sphere_node_index(rule, v))
                .collect::<Result<_>>()?;
            let realizable = check_hat(u)?.is_realizable(strict);
            let density = realizable.then(|| {
                let mut psi = vec![0.0; rule.len()];
                for (i, &q) in nodes.iter().enumerate() {
                    psi[q] += values[i] / w[q];
                }
                psi
            });
            Ok(NumericalVerdict {
                realizable,
                nodal_density: density,
            })
        }
        AngularBasis::PartialMomentsSphere(mesh) => {
            let mut realizable = true;
            for j in 0..mesh.triangle_count() {
                let u0 = values[4 * j];
                let u1 = Vec3::new(values[4 * j + 1], values[4 * j + 2], values[4 * j + 3]);
                if u0 == 0.0 && u1 == Vec3::zeros() {
                    realizable &= !strict;
                    continue;
                }
                if !(u0 > 0.0) {
                    realizable = false;
                    break;
                }
                let points: Vec<Vec3> = rule
                    .nodes()
                    .iter()
                    .zip(rule.cells())
                    .filter(|(_, &c)| c == j)
                    .filter_map(|(x, _)| x.sphere())
                    .collect();
                let slack = if strict { -MEMBERSHIP_TOL } else { MEMBERSHIP_TOL };
                if !ConvexHull::new(&points).contains(u1 / u0, slack) {
                    realizable = false;
                    break;
                }
            }
            Ok(NumericalVerdict {
                realizable,
                nodal_density: None,
            })
        }
        other => Err(Error::Unsupported(format!(
            "numerical realizability for {}",
            other.model_name(true)
        ))),
    }
}
