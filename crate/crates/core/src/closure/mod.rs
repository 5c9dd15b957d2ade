//! Minimum-entropy closures: the dual problem, its Newton solver and the
//! linear closure.

mod analytic;
mod entropy;

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};

use crate::basis::{AngularBasis, MomentVector};
use crate::error::{Error, Result};
use crate::geometry::Direction;
use crate::linalg::BandedSym;
use crate::quadrature::{BasisTable, QuadratureRule};

pub use analytic::{analytic_hat_moments, analytic_pm_moments_1d, DEFAULT_TAYLOR_THRESHOLD};
pub use entropy::Entropy;

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-13;
const BE_MARGIN: f64 = 1e-12;
const REGULARIZATION: f64 = 1e-12;
/// Objective changes below this (relative) size are treated as rounding noise.
const ROUNDING: f64 = 1e-11;

/// Newton solver settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Bound on the gradient max-norm relative to `ρ(u)`.
    pub tol: f64,
    pub max_iter: usize,
    pub taylor_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 200,
            taylor_threshold: DEFAULT_TAYLOR_THRESHOLD,
        }
    }
}

/// Lagrange multipliers of a closure.
#[derive(Clone, Debug, PartialEq)]
pub struct Multipliers {
    pub values: Vec<f64>,
    pub basis: AngularBasis,
    pub entropy: Entropy,
}

impl Multipliers {
    /// Ansatz `η*'(bᵀα)` at a point.
    pub fn evaluate(&self, point: &Direction) -> Result<f64> {
        evaluate_ansatz(&self.basis, self.entropy, &self.values, point)
    }

    /// Ansatz using the continuous extension of `cell`.
    pub fn evaluate_in_cell(&self, point: &Direction, cell: usize) -> Result<f64> {
        let b = self.basis.evaluate_in_cell(point, cell)?;
        ansatz_value(self.entropy, dot(&b, &self.values))
    }
}

#[derive(Clone, Debug)]
pub struct ClosureResult {
    pub multipliers: Multipliers,
    /// `⟨b ψ⟩` of the returned ansatz under the solver's rule.
    pub achieved: MomentVector,
    /// `‖⟨bψ⟩ − u‖∞ / ρ(u)`.
    pub residual: f64,
    pub iterations: usize,
    pub wall_time: Duration,
    /// Objective value at every accepted iterate (scaled problem).
    pub objective_history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn ansatz_value(entropy: Entropy, p: f64) -> Result<f64> {
    if !entropy.in_domain(p) {
        return Err(Error::DomainViolation { node: 0, value: p });
    }
    Ok(entropy.dual_d1(p))
}

/// `η*'(b(x)ᵀα)`.
pub fn evaluate_ansatz(basis: &AngularBasis, entropy: Entropy, alpha: &[f64], point: &Direction) -> Result<f64> {
    if alpha.len() != basis.dimension() {
        return Err(Error::invalid("multiplier length does not match the basis"));
    }
    let b = basis.evaluate(point)?;
    ansatz_value(entropy, dot(&b, alpha))
}

/// Objective, gradient and Hessian of the dual problem.
#[derive(Clone, Debug)]
pub struct DualTerms {
    pub objective: f64,
    pub gradient: Vec<f64>,
    pub hessian: DMatrix<f64>,
}

/// The discretized dual problem `min ⟨η*(bᵀα)⟩ − uᵀα` on a fixed rule.
#[derive(Clone, Debug)]
pub struct DualProblem {
    table: BasisTable,
    entropy: Entropy,
    bandwidth: usize,
}

struct Evaluation {
    objective: f64,
    gradient: Vec<f64>,
}

impl DualProblem {
    pub fn new(basis: &AngularBasis, rule: &QuadratureRule, entropy: Entropy) -> Result<Self> {
        let table = BasisTable::new(basis, rule)?;
        Ok(Self::from_table(table, entropy))
    }

    pub fn from_table(table: BasisTable, entropy: Entropy) -> Self {
        let bandwidth = table.bandwidth();
        Self { table, entropy, bandwidth }
    }

    pub fn table(&self) -> &BasisTable {
        &self.table
    }

    pub fn entropy(&self) -> Entropy {
        self.entropy
    }

    fn potentials(&self, alpha: &[f64]) -> Result<Vec<f64>> {
        let p: Vec<f64> = (0..self.table.len()).map(|q| self.table.dot(q, alpha)).collect();
        for (q, &v) in p.iter().enumerate() {
            let ok = match self.entropy {
                Entropy::BoseEinstein => v < -BE_MARGIN,
                _ => v.is_finite(),
            };
            if !ok {
                return Err(Error::DomainViolation { node: q, value: v });
            }
        }
        Ok(p)
    }

    fn evaluate(&self, u: &[f64], alpha: &[f64], hessian: Option<&mut BandedSym>) -> Result<Evaluation> {
        let p = self.potentials(alpha)?;
        let e = self.entropy;
        let w = self.table.weights();
        let mut objective = -dot(u, alpha);
        let mut gradient: Vec<f64> = u.iter().map(|x| -x).collect();
        for q in 0..p.len() {
            objective += w[q] * e.dual(p[q]);
            let s = w[q] * e.dual_d1(p[q]);
            let (idx, val) = self.table.row(q);
            for (&i, v) in idx.iter().zip(val) {
                gradient[i] += s * v;
            }
        }
        if let Some(h) = hessian {
            h.fill_zero();
            for q in 0..p.len() {
                let s = w[q] * e.dual_d2(p[q]);
                let (idx, val) = self.table.row(q);
                for (a, (&i, vi)) in idx.iter().zip(val).enumerate() {
                    let si = s * vi;
                    for (&j, vj) in idx[..=a].iter().zip(val) {
                        if i >= j {
                            h.add(i, j, si * vj);
                        } else {
                            h.add(j, i, si * vj);
                        }
                    }
                }
            }
        }
        Ok(Evaluation { objective, gradient })
    }

    /// Objective, gradient and dense Hessian at `alpha`.
    pub fn dual_terms(&self, u: &[f64], alpha: &[f64]) -> Result<DualTerms> {
        let n = self.table.dimension();
        let mut h = BandedSym::zeros(n, self.bandwidth);
        let ev = self.evaluate(u, alpha, Some(&mut h))?;
        let hessian = DMatrix::from_fn(n, n, |i, j| if i >= j { h.get(i, j) } else { h.get(j, i) });
        Ok(DualTerms {
            objective: ev.objective,
            gradient: ev.gradient,
            hessian,
        })
    }

    /// `⟨b η*'(bᵀα)⟩`.
    pub fn moments(&self, alpha: &[f64]) -> Result<Vec<f64>> {
        let p = self.potentials(alpha)?;
        let e = self.entropy;
        Ok(self.table.integrate_weighted(|q| e.dual_d1(p[q])))
    }

    /// Newton iteration from `alpha0` for `u` with tolerance `tol_abs` on the
    /// gradient max-norm.
    fn newton(
        &self,
        u: &[f64],
        mut alpha: Vec<f64>,
        tol_abs: f64,
        max_iter: usize,
        history: &mut Vec<f64>,
    ) -> Result<(Vec<f64>, usize)> {
        let n = alpha.len();
        let mut h = BandedSym::zeros(n, self.bandwidth);
        let mut ev = self.evaluate(u, &alpha, Some(&mut h))?;
        history.push(ev.objective);
        for iter in 0..=max_iter {
            let gnorm = max_norm(&ev.gradient);
            if gnorm <= tol_abs {
                return Ok((alpha, iter));
            }
            if iter == max_iter {
                break;
            }
            let rhs: Vec<f64> = ev.gradient.iter().map(|g| -g).collect();
            let chol = match h.cholesky() {
                Some(c) => c,
                None => {
                    let shift = REGULARIZATION * h.trace().abs().max(f64::MIN_POSITIVE) / n as f64;
                    h.add_diagonal(shift);
                    h.cholesky().ok_or(Error::SingularHessian)?
                }
            };
            let d = chol.solve(&rhs);
            if d.iter().any(|x| !x.is_finite()) {
                return Err(Error::SingularHessian);
            }
            let slope = dot(&ev.gradient, &d);
            let mut t = 1.0;
            let mut last_domain: Option<Error> = None;
            let accepted = loop {
                if t < MIN_STEP {
                    break None;
                }
                let trial: Vec<f64> = alpha.iter().zip(&d).map(|(a, s)| a + t * s).collect();
                match self.evaluate(u, &trial, None) {
                    Ok(tv) if tv.objective.is_finite() => {
                        let decrease = tv.objective - ev.objective;
                        let armijo = decrease <= ARMIJO * t * slope;
                        let rounding = t == 1.0
                            && decrease <= ROUNDING * (1.0 + ev.objective.abs())
                            && max_norm(&tv.gradient) < gnorm;
                        if armijo || rounding {
                            break Some(trial);
                        }
                        last_domain = None;
                    }
                    Ok(_) => last_domain = None,
                    Err(e @ Error::DomainViolation { .. }) => last_domain = Some(e),
                    Err(e) => return Err(e),
                }
                t *= 0.5;
            };
            match accepted {
                Some(next) => {
                    alpha = next;
                    ev = self.evaluate(u, &alpha, Some(&mut h))?;
                    history.push(ev.objective);
                }
                None => {
                    return Err(last_domain.unwrap_or(Error::LineSearchStalled {
                        iterations: iter,
                        residual: gnorm,
                    }))
                }
            }
        }
        Err(Error::MaxIterations {
            iterations: max_iter,
            residual: max_norm(&ev.gradient),
        })
    }

    /// Solves the closure for `u` (see [`solve_dual`]).
    pub fn solve(&self, basis: &AngularBasis, u: &MomentVector, config: &SolverConfig) -> Result<ClosureResult> {
        let start = Instant::now();
        let n = basis.dimension();
        if u.len() != n || self.table.dimension() != n {
            return Err(Error::invalid("moment vector, basis and rule dimensions differ"));
        }
        let rho = u.density();
        if !(rho > 0.0) {
            return Err(Error::invalid(format!("moment vector has non-positive density {rho}")));
        }
        let c = basis.constant_coefficients();
        let measure: f64 = self.table.weights().iter().sum();
        let mut history = Vec::new();
        let (alpha, iterations) = match self.entropy {
            Entropy::MaxwellBoltzmann => {
                // solve for u/ρ, then shift by log ρ along the constant direction
                let us: Vec<f64> = u.values().iter().map(|x| x / rho).collect();
                let a0 = scaled(&c, Entropy::MaxwellBoltzmann.inverse_d1(1.0 / measure));
                let (mut a, it) = self.newton(&us, a0, config.tol, config.max_iter, &mut history)?;
                for (ai, ci) in a.iter_mut().zip(&c) {
                    *ai += rho.ln() * ci;
                }
                (a, it)
            }
            Entropy::BoseEinstein => {
                let a0 = scaled(&c, Entropy::BoseEinstein.inverse_d1(rho / measure));
                self.newton(u.values(), a0, config.tol * rho, config.max_iter, &mut history)?
            }
            Entropy::Quadratic => {
                let a = linear_closure_table(&self.table, u.values())?;
                (a, 0)
            }
        };
        let achieved = self.moments(&alpha)?;
        let residual = achieved
            .iter()
            .zip(u.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / rho;
        Ok(ClosureResult {
            multipliers: Multipliers {
                values: alpha,
                basis: basis.clone(),
                entropy: self.entropy,
            },
            achieved: MomentVector::new(achieved, basis.clone())?,
            residual,
            iterations,
            wall_time: start.elapsed(),
            objective_history: history,
        })
    }
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| if x.abs() > m || x.is_nan() { x.abs() } else { m })
}

fn scaled(c: &[f64], s: f64) -> Vec<f64> {
    c.iter().map(|x| x * s).collect()
}

/// Dual objective, gradient and Hessian on `rule`.
pub fn dual_terms(
    basis: &AngularBasis,
    entropy: Entropy,
    rule: &QuadratureRule,
    u: &MomentVector,
    alpha: &[f64],
) -> Result<DualTerms> {
    DualProblem::new(basis, rule, entropy)?.dual_terms(u.values(), alpha)
}

/// Minimum-entropy multipliers for `u` by damped Newton from the isotropic
/// guess, integrating on `rule`.
pub fn solve_dual(
    basis: &AngularBasis,
    entropy: Entropy,
    rule: &QuadratureRule,
    u: &MomentVector,
    config: &SolverConfig,
) -> Result<ClosureResult> {
    DualProblem::new(basis, rule, entropy)?.solve(basis, u, config)
}

fn mass_from_table(table: &BasisTable) -> DMatrix<f64> {
    let n = table.dimension();
    let mut m = DMatrix::zeros(n, n);
    for q in 0..table.len() {
        let w = table.weights()[q];
        let (idx, val) = table.row(q);
        for (&i, vi) in idx.iter().zip(val) {
            for (&j, vj) in idx.iter().zip(val) {
                m[(i, j)] += w * vi * vj;
            }
        }
    }
    m
}

/// `M_ij = ⟨b_i b_j⟩` on `rule`.
pub fn mass_matrix(basis: &AngularBasis, rule: &QuadratureRule) -> Result<DMatrix<f64>> {
    Ok(mass_from_table(&BasisTable::new(basis, rule)?))
}

fn linear_closure_table(table: &BasisTable, u: &[f64]) -> Result<Vec<f64>> {
    let m = mass_from_table(table);
    let chol = m.cholesky().ok_or(Error::SingularHessian)?;
    let alpha = chol.solve(&DVector::from_column_slice(u));
    if alpha.iter().any(|x| !x.is_finite()) {
        return Err(Error::SingularHessian);
    }
    Ok(alpha.as_slice().to_vec())
}

/// `α = M⁻¹u`, the closure of the quadratic entropy.
pub fn linear_closure(basis: &AngularBasis, rule: &QuadratureRule, u: &MomentVector) -> Result<Multipliers> {
    let table = BasisTable::new(basis, rule)?;
    Ok(Multipliers {
        values: linear_closure_table(&table, u.values())?,
        basis: basis.clone(),
        entropy: Entropy::Quadratic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Partition1D;

    fn rule1d(basis: &AngularBasis) -> QuadratureRule {
        QuadratureRule::for_basis(basis, 20, 18).unwrap()
    }

    #[test]
    fn ansatz_examples() {
        let b = AngularBasis::hat_equidistant(2).unwrap();
        let v = evaluate_ansatz(&b, Entropy::MaxwellBoltzmann, &[0.0, 2f64.ln(), 0.0], &Direction::Slab(0.0)).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
        let l = AngularBasis::Legendre1D { order: 3 };
        let v = evaluate_ansatz(&l, Entropy::Quadratic, &[0.5, 0.0, 0.0, 0.0], &Direction::Slab(0.3)).unwrap();
        assert_eq!(v, 0.5);
        let v = evaluate_ansatz(&l, Entropy::MaxwellBoltzmann, &[0.0; 4], &Direction::Slab(-0.7)).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn isotropic_hat_solve() {
        let b = AngularBasis::hat_equidistant(4).unwrap();
        let rule = rule1d(&b);
        let u = b.isotropic_moment().scaled(3.0);
        let r = solve_dual(&b, Entropy::MaxwellBoltzmann, &rule, &u, &SolverConfig::default()).unwrap();
        assert!(r.iterations <= 1);
        for a in &r.multipliers.values {
            assert!((a - 3f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn m1_converges() {
        let b = AngularBasis::Monomial1D { order: 1 };
        let rule = rule1d(&b);
        let u = MomentVector::new(vec![1.0, 0.9], b.clone()).unwrap();
        let r = solve_dual(&b, Entropy::MaxwellBoltzmann, &rule, &u, &SolverConfig::default()).unwrap();
        assert!(r.residual <= 1e-9);
        for w in r.objective_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-14 * w[0].abs());
        }
    }

    #[test]
    fn bose_einstein_round_trip() {
        let b = AngularBasis::partial_equidistant(3).unwrap();
        let rule = rule1d(&b);
        let alpha = vec![-1.0, 0.3, -2.0, -0.5, -0.7, 0.2];
        let problem = DualProblem::new(&b, &rule, Entropy::BoseEinstein).unwrap();
        let u = MomentVector::new(problem.moments(&alpha).unwrap(), b.clone()).unwrap();
        let r = problem.solve(&b, &u, &SolverConfig::default()).unwrap();
        for (x, y) in r.multipliers.values.iter().zip(&alpha) {
            assert!((x - y).abs() < 1e-6);
        }
    }

    #[test]
    fn mass_matrices() {
        let l = AngularBasis::Legendre1D { order: 2 };
        let m = mass_matrix(&l, &rule1d(&l)).unwrap();
        for (i, d) in [2.0, 2.0 / 3.0, 0.4].iter().enumerate() {
            assert!((m[(i, i)] - d).abs() < 1e-14);
        }
        let h = AngularBasis::HatFunctions1D(Partition1D::equidistant(2).unwrap());
        let m = mass_matrix(&h, &rule1d(&h)).unwrap();
        let expect = [[1.0 / 3.0, 1.0 / 6.0, 0.0], [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], [0.0, 1.0 / 6.0, 1.0 / 3.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((m[(i, j)] - expect[i][j]).abs() < 1e-14);
            }
        }
        let u = MomentVector::new(vec![2.0, 0.0, 0.0], l.clone()).unwrap();
        let a = linear_closure(&l, &rule1d(&l), &u).unwrap();
        assert!((a.values[0] - 1.0).abs() < 1e-14 && a.values[1].abs() < 1e-14);
    }
}
