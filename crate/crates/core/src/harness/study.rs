//! Convergence studies and solver timings.

use std::time::Duration;

use crate::basis::{AngularBasis, MomentVector};
use crate::closure::{DualProblem, Entropy, Multipliers, SolverConfig};
use crate::error::Result;
use crate::geometry::{Direction, Geometry};
use crate::parallel::par_map;
use crate::quadrature::{BasisTable, FineResolution, QuadratureRule};

use super::config::StudyConfig;
use super::densities::TestDensity;
use super::models::{ModelKind, ModelSpec};

/// One line of a study table. Failed rows carry `failure` and NaN errors.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub model: String,
    pub n: usize,
    pub entropy: Entropy,
    pub l1: f64,
    pub linf: f64,
    pub iterations: usize,
    pub time_ns: u64,
    /// Empirical order against the previous row of the same model.
    pub order: Option<f64>,
    pub failure: Option<String>,
}

impl ExperimentRow {
    pub fn succeeded(&self) -> bool {
        self.failure.is_none()
    }

    fn failed(model: &str, n: usize, entropy: Entropy, why: String) -> Self {
        Self {
            model: model.to_string(),
            n,
            entropy,
            l1: f64::NAN,
            linf: f64::NAN,
            iterations: 0,
            time_ns: 0,
            order: None,
            failure: Some(why),
        }
    }
}

/// Rows of one density.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyTable {
    pub density: TestDensity,
    pub rows: Vec<ExperimentRow>,
}

impl StudyTable {
    pub fn rows_of<'a>(&'a self, model: &'a str) -> impl Iterator<Item = &'a ExperimentRow> + 'a {
        self.rows.iter().filter(move |r| r.model == model)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ExperimentRow> {
        self.rows.iter().filter(|r| !r.succeeded())
    }
}

/// Errors and solver statistics of one closure.
#[derive(Clone, Debug, PartialEq)]
pub struct Approximation {
    pub multipliers: Multipliers,
    pub l1: f64,
    pub linf: f64,
    pub iterations: usize,
    pub wall_time: Duration,
}

/// `ψ` at the rule nodes. A node on a jump of the density takes the value
/// from the side of its own element.
pub fn sample_density(density: &TestDensity, rule: &QuadratureRule) -> Result<Vec<f64>> {
    let jumps = density.breakpoints();
    let mids = rule.element_midpoints();
    let mut psi = vec![0.0; rule.len()];
    for (e, range) in rule.elements().iter().enumerate() {
        for q in range.clone() {
            let x = rule.nodes()[q];
            psi[q] = match (x, mids[e].0) {
                (Direction::Slab(mu), Direction::Slab(m)) if jumps.contains(&mu) => {
                    density.evaluate(&Direction::Slab(mu + 1e-9 * (m - mu)))?
                }
                _ => density.evaluate(&x)?,
            };
        }
    }
    Ok(psi)
}

/// `⟨b ψ⟩` on `rule`.
pub fn reference_moments_on(density: &TestDensity, basis: &AngularBasis, rule: &QuadratureRule) -> Result<MomentVector> {
    let table = BasisTable::new(basis, rule)?;
    let psi = sample_density(density, rule)?;
    MomentVector::new(table.integrate_weighted(|q| psi[q]), basis.clone())
}

/// `⟨b ψ⟩` on the fine rule of `basis`, split at the jumps of `density`.
pub fn reference_moments(density: &TestDensity, basis: &AngularBasis, res: FineResolution) -> Result<MomentVector> {
    let rule = QuadratureRule::fine(basis, &density.breakpoints(), res)?;
    reference_moments_on(density, basis, &rule)
}

fn error_norms(
    density: &TestDensity,
    problem: &DualProblem,
    rule: &QuadratureRule,
    psi: &[f64],
    m: &Multipliers,
) -> Result<(f64, f64)> {
    let table = problem.table();
    let entropy = problem.entropy();
    let (mut l1, mut linf) = (0.0, 0.0_f64);
    for (q, (&w, &p)) in rule.weights().iter().zip(psi).enumerate() {
        let d = (entropy.dual_d1(table.dot(q, &m.values)) - p).abs();
        l1 += w * d;
        linf = linf.max(d);
    }
    for (x, cell) in rule.element_midpoints() {
        let d = (m.evaluate_in_cell(&x, cell)? - density.evaluate(&x)?).abs();
        linf = linf.max(d);
    }
    Ok((l1, linf))
}

/// Solves the closure of `u` on `rule` and measures `L1` and `L∞` errors
/// against `density` on the nodes of `rule` and its element midpoints.
pub fn approximation_error(
    density: &TestDensity,
    basis: &AngularBasis,
    entropy: Entropy,
    u: &MomentVector,
    rule: &QuadratureRule,
    solver: &SolverConfig,
) -> Result<Approximation> {
    let problem = DualProblem::new(basis, rule, entropy)?;
    let psi = sample_density(density, rule)?;
    solve_and_measure(density, basis, u, rule, &problem, &psi, solver)
}

fn solve_and_measure(
    density: &TestDensity,
    basis: &AngularBasis,
    u: &MomentVector,
    rule: &QuadratureRule,
    problem: &DualProblem,
    psi: &[f64],
    solver: &SolverConfig,
) -> Result<Approximation> {
    let result = problem.solve(basis, u, solver)?;
    let (l1, linf) = error_norms(density, problem, rule, psi, &result.multipliers)?;
    Ok(Approximation {
        multipliers: result.multipliers,
        l1,
        linf,
        iterations: result.iterations,
        wall_time: result.wall_time,
    })
}

fn study_row(
    density: &TestDensity,
    spec: &ModelSpec,
    index: usize,
    config: &StudyConfig,
) -> Result<ExperimentRow> {
    let basis = spec.basis(density.geometry(), index)?;
    let entropy = spec.closure_entropy(config.entropy);
    let rule = QuadratureRule::fine(&basis, &density.breakpoints(), config.resolution)?;
    let table = BasisTable::new(&basis, &rule)?;
    let psi = sample_density(density, &rule)?;
    let u = MomentVector::new(table.integrate_weighted(|q| psi[q]), basis.clone())?;
    let problem = DualProblem::from_table(table, entropy);
    let a = solve_and_measure(density, &basis, &u, &rule, &problem, &psi, &config.solver)?;
    Ok(ExperimentRow {
        model: spec.tag().to_string(),
        n: basis.dimension(),
        entropy,
        l1: a.l1,
        linf: a.linf,
        iterations: a.iterations,
        time_ns: a.wall_time.as_nanos() as u64,
        order: None,
        failure: None,
    })
}

/// `-log(e2/e1) / log(n2/n1)`.
pub fn empirical_order(n1: usize, e1: f64, n2: usize, e2: f64) -> f64 {
    -(e2 / e1).ln() / (n2 as f64 / n1 as f64).ln()
}

/// Least-squares slope of `log y` against `log x`.
pub fn scaling_exponent(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Fills `order` from consecutive successful rows of each model.
pub fn assign_orders(rows: &mut [ExperimentRow]) {
    for i in 0..rows.len() {
        rows[i].order = None;
        if i == 0 || rows[i - 1].model != rows[i].model {
            continue;
        }
        let (p, r) = (&rows[i - 1], &rows[i]);
        if p.succeeded() && r.succeeded() && p.n != r.n {
            rows[i].order = Some(empirical_order(p.n, p.l1, r.n, r.l1));
        }
    }
}

struct Job<'a> {
    density: TestDensity,
    spec: &'a ModelSpec,
    index: usize,
}

fn jobs<'a>(config: &'a StudyConfig, indices: impl Fn(&ModelSpec, Geometry) -> Result<Vec<usize>>) -> Result<Vec<Job<'a>>> {
    let mut out = Vec::new();
    for &density in &config.densities {
        for spec in &config.models {
            for index in indices(spec, density.geometry())? {
                out.push(Job { density, spec, index });
            }
        }
    }
    Ok(out)
}

fn tables(config: &StudyConfig, jobs: &[Job], mut rows: Vec<ExperimentRow>) -> Vec<StudyTable> {
    let mut out = Vec::new();
    for &density in &config.densities {
        let mut table: Vec<ExperimentRow> = Vec::new();
        for (job, row) in jobs.iter().zip(rows.iter_mut()) {
            if job.density == density {
                table.push(row.clone());
            }
        }
        // model order as configured, then n
        let rank = |m: &str| config.models.iter().position(|s| s.tag() == m).unwrap_or(usize::MAX);
        table.sort_by(|a, b| rank(&a.model).cmp(&rank(&b.model)).then(a.n.cmp(&b.n)));
        assign_orders(&mut table);
        out.push(StudyTable { density, rows: table });
    }
    out
}

fn row_or_failure(job: &Job, config: &StudyConfig, r: Result<ExperimentRow>) -> ExperimentRow {
    r.unwrap_or_else(|e| {
        let n = job
            .spec
            .basis(job.density.geometry(), job.index)
            .map(|b| b.dimension())
            .unwrap_or(job.index);
        ExperimentRow::failed(
            job.spec.tag(),
            n,
            job.spec.closure_entropy(config.entropy),
            format!("{} n={n} on {}: {e}", job.spec.tag(), job.density),
        )
    })
}

/// Projects every density onto every model of `config` and measures the
/// closure errors. Rows are computed with `config.execution`; solver failures
/// are recorded in their row.
pub fn convergence_study(config: &StudyConfig) -> Result<Vec<StudyTable>> {
    let jobs = jobs(config, |s, g| s.sequence(g, config.nmax))?;
    let rows = par_map(&jobs, config.execution, |job| {
        row_or_failure(job, config, study_row(&job.density, job.spec, job.index, config))
    });
    Ok(tables(config, &jobs, rows))
}

/// Default index sequences of the timing benchmark.
pub fn timing_indices(spec: &ModelSpec, geometry: Geometry) -> Vec<usize> {
    match (spec.kind, geometry) {
        (ModelKind::Full, Geometry::Slab) => vec![2, 4, 8, 16, 32],
        (ModelKind::Hat, Geometry::Slab) | (ModelKind::Partial, Geometry::Slab) => vec![8, 16, 32, 64, 128],
        _ => spec.default_indices(geometry),
    }
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2
    }
}

fn timing_row(density: &TestDensity, spec: &ModelSpec, index: usize, config: &StudyConfig) -> Result<ExperimentRow> {
    let basis = spec.basis(density.geometry(), index)?;
    let entropy = spec.closure_entropy(config.entropy);
    let rule = QuadratureRule::shared(&basis, config.resolution)?;
    let table = BasisTable::new(&basis, &rule)?;
    let psi = sample_density(density, &rule)?;
    let u = MomentVector::new(table.integrate_weighted(|q| psi[q]), basis.clone())?;
    let problem = DualProblem::from_table(table, entropy);
    for _ in 0..config.warmups {
        problem.solve(&basis, &u, &config.solver)?;
    }
    let mut times = Vec::with_capacity(config.repetitions);
    let mut last = None;
    for _ in 0..config.repetitions.max(1) {
        let r = problem.solve(&basis, &u, &config.solver)?;
        times.push(r.wall_time);
        last = Some(r);
    }
    let last = last.expect("at least one repetition");
    let (l1, linf) = error_norms(density, &problem, &rule, &psi, &last.multipliers)?;
    Ok(ExperimentRow {
        model: spec.tag().to_string(),
        n: basis.dimension(),
        entropy,
        l1,
        linf,
        iterations: last.iterations,
        time_ns: median(times).as_nanos() as u64,
        order: None,
        failure: None,
    })
}

/// Median solve times over `config.repetitions` runs after
/// `config.warmups` warm-up solves, one model after another. Each model
/// solves on a rule whose nodes do not depend on `n` apart from the model's
/// cell boundaries; the basis table is built before timing starts.
pub fn timing_benchmark(config: &StudyConfig) -> Result<Vec<StudyTable>> {
    let jobs = jobs(config, |s, g| {
        let ix = s.indices.clone().unwrap_or_else(|| timing_indices(s, g));
        let mut out = Vec::new();
        for i in ix {
            if config.nmax.is_none_or(|m| s.basis(g, i).is_ok_and(|b| b.dimension() <= m)) {
                out.push(i);
            }
        }
        Ok(out)
    })?;
    let rows = jobs
        .iter()
        .map(|job| row_or_failure(job, config, timing_row(&job.density, job.spec, job.index, config)))
        .collect();
    Ok(tables(config, &jobs, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_zeroth_moment() {
        let basis = AngularBasis::Legendre1D { order: 0 };
        let u = reference_moments(&TestDensity::GAUSS_1D, &basis, FineResolution::default()).unwrap();
        // erf(√2)
        assert!((u.values()[0] - 0.954_499_736_103_642).abs() < 1e-13);
    }

    #[test]
    fn heaviside_pm_pairs() {
        let basis = AngularBasis::partial_equidistant(2).unwrap();
        let u = reference_moments(&TestDensity::HEAVISIDE_1D, &basis, FineResolution::default()).unwrap();
        let want = [5e-9, -2.5e-9, 1.0, 0.5];
        for (a, b) in u.values().iter().zip(want) {
            assert!((a - b).abs() < 1e-13 * b.abs().max(1e-8), "{a} {b}");
        }
    }

    #[test]
    fn hat_partition_of_unity() {
        let res = FineResolution::default();
        for d in [TestDensity::CROSSING_BEAMS_1D, TestDensity::HEAVISIDE_1D] {
            let u = reference_moments(&d, &AngularBasis::hat_equidistant(7).unwrap(), res).unwrap();
            let mass = reference_moments(&d, &AngularBasis::Legendre1D { order: 0 }, res).unwrap();
            assert!((u.values().iter().sum::<f64>() - mass.values()[0]).abs() < 1e-12);
        }
        let g = reference_moments(&TestDensity::GAUSS_3D, &AngularBasis::hat_sphere(1), res).unwrap();
        assert!((g.values().iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn orders() {
        assert!((empirical_order(4, 1.0, 8, 0.25) - 2.0).abs() < 1e-15);
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(1.5))).collect();
        assert!((scaling_exponent(&pts) - 1.5).abs() < 1e-12);
        let row = |n, l1| ExperimentRow {
            model: "HFM".into(),
            n,
            entropy: Entropy::MaxwellBoltzmann,
            l1,
            linf: 0.0,
            iterations: 1,
            time_ns: 0,
            order: None,
            failure: None,
        };
        let mut rows = vec![row(5, 1.0), row(9, 0.25), row(17, 0.0625)];
        rows[2].model = "PMM".into();
        assign_orders(&mut rows);
        assert_eq!(rows[0].order, None);
        assert!((rows[1].order.unwrap() - 2.0 * (2.0f64).ln() / (1.8f64).ln()).abs() < 1e-12);
        assert_eq!(rows[2].order, None);
    }

    #[test]
    fn representable_density_is_exact() {
        // the 3D Gauss is exp of a first-order polynomial
        let basis = AngularBasis::SphericalHarmonics { order: 1 };
        let res = FineResolution {
            level: 2,
            ..FineResolution::default()
        };
        let rule = QuadratureRule::fine(&basis, &[], res).unwrap();
        let u = reference_moments_on(&TestDensity::GAUSS_3D, &basis, &rule).unwrap();
        let a = approximation_error(
            &TestDensity::GAUSS_3D,
            &basis,
            Entropy::MaxwellBoltzmann,
            &u,
            &rule,
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(a.l1 < 1e-8 && a.linf < 1e-8, "{} {}", a.l1, a.linf);
    }
}
