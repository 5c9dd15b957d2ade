//! Closed-form Maxwell–Boltzmann moment integrals for the slab hat and
//! partial-moment bases.

use crate::basis::{AngularBasis, MomentVector};
use crate::error::{Error, Result};
use crate::geometry::Partition1D;

/// Default magnitude below which the truncated series replaces the closed
/// form.
pub const DEFAULT_TAYLOR_THRESHOLD: f64 = 1e-2;

const SERIES_TERMS: usize = 8;

/// `φ1(x) = (e^x − 1)/x = Σ x^l/(l+1)!`.
fn phi1(x: f64, threshold: f64) -> f64 {
    if x.abs() >= threshold {
        x.exp_m1() / x
    } else {
        let (mut term, mut sum) = (1.0, 0.0);
        for l in 0..SERIES_TERMS {
            sum += term;
            term *= x / (l as f64 + 2.0);
        }
        sum
    }
}

/// `φ2(x) = (e^x − 1 − x)/x² = Σ x^l/(l+2)!`.
fn phi2(x: f64, threshold: f64) -> f64 {
    if x.abs() >= threshold {
        (x.exp_m1() - x) / (x * x)
    } else {
        let (mut term, mut sum) = (0.5, 0.0);
        for l in 0..SERIES_TERMS {
            sum += term;
            term *= x / (l as f64 + 3.0);
        }
        sum
    }
}

/// `∫₀¹ t e^{xt} dt = e^x φ2(−x)`.
fn psi2(x: f64, threshold: f64) -> f64 {
    x.exp() * phi2(-x, threshold)
}

/// `⟨h e^{hᵀα}⟩` for the hat basis on `partition`.
pub fn analytic_hat_moments(partition: &Partition1D, alpha: &[f64], threshold: f64) -> Result<MomentVector> {
    let k = partition.intervals();
    if alpha.len() != k + 1 {
        return Err(Error::invalid(format!("expected {} multipliers, got {}", k + 1, alpha.len())));
    }
    let mut u = vec![0.0; k + 1];
    for j in 0..k {
        let h = partition.width(j);
        let (l, r) = (alpha[j], alpha[j + 1]);
        // right half of hat j, left half of hat j+1
        u[j] += h * l.exp() * phi2(r - l, threshold);
        u[j + 1] += h * r.exp() * phi2(l - r, threshold);
    }
    MomentVector::new(u, AngularBasis::HatFunctions1D(partition.clone()))
}

/// `⟨p e^{pᵀα}⟩` for the partial-moment basis on `partition`, with `α`
/// ordered `(α_{0,0}, α_{0,1}, α_{1,0}, …)`.
pub fn analytic_pm_moments_1d(partition: &Partition1D, alpha: &[f64], threshold: f64) -> Result<MomentVector> {
    let k = partition.intervals();
    if alpha.len() != 2 * k {
        return Err(Error::invalid(format!("expected {} multipliers, got {}", 2 * k, alpha.len())));
    }
    let mut u = vec![0.0; 2 * k];
    for j in 0..k {
        let (a, _) = partition.interval(j);
        let h = partition.width(j);
        let (a0, a1) = (alpha[2 * j], alpha[2 * j + 1]);
        let x = a1 * h;
        let scale = (a0 + a1 * a).exp();
        u[2 * j] = scale * h * phi1(x, threshold);
        u[2 * j + 1] = scale * (a * h * phi1(x, threshold) + h * h * psi2(x, threshold));
    }
    MomentVector::new(u, AngularBasis::PartialMoments1D(partition.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_ansatz() {
        let p = Partition1D::equidistant(2).unwrap();
        let u = analytic_hat_moments(&p, &[0.0; 3], DEFAULT_TAYLOR_THRESHOLD).unwrap();
        assert_eq!(u.values(), &[0.5, 1.0, 0.5]);
        let u = analytic_pm_moments_1d(&p, &[0.3, 0.0, -0.2, 0.0], DEFAULT_TAYLOR_THRESHOLD).unwrap();
        let e = [0.3f64.exp(), (-0.2f64).exp()];
        let expect = [e[0], -0.5 * e[0], e[1], 0.5 * e[1]];
        for (a, b) in u.values().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn branches_agree() {
        for &x in &[1e-9, -1e-9, 1e-5, -3e-3, 0.0099, -0.0099] {
            let t = DEFAULT_TAYLOR_THRESHOLD;
            assert!((phi1(x, 0.0) - phi1(x, t)).abs() < 1e-12 || x == 0.0);
            assert!((phi2(x, 1e-6) - phi2(x, t)).abs() < 1e-9);
        }
        assert!((phi2(1e-2, 0.0) - phi2(1e-2, 1.0)).abs() < 1e-14);
        assert!((psi2(0.3, 0.0) - psi2(0.3, 1.0)).abs() < 1e-10);
    }
}
