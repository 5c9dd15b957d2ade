//! Study configuration from flat `key=value` files and command-line flags.

use std::path::{Path, PathBuf};

use crate::closure::{Entropy, SolverConfig};
use crate::error::{Error, Result};
use crate::parallel::Execution;
use crate::quadrature::FineResolution;

use super::densities::{parse_densities, TestDensity};
use super::models::{parse_models, ModelSpec};

/// Iteration cap of study solves. High-order full-moment closures of
/// densities with vacuum regions need several hundred damped steps.
pub const STUDY_MAX_ITER: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub densities: Vec<TestDensity>,
    pub models: Vec<ModelSpec>,
    /// Entropy of the nonlinear models; linear models always use the quadratic one.
    pub entropy: Entropy,
    /// Drop models with more than `nmax` moments.
    pub nmax: Option<usize>,
    pub out: Option<PathBuf>,
    pub solver: SolverConfig,
    pub resolution: FineResolution,
    pub execution: Execution,
    pub repetitions: usize,
    pub warmups: usize,
    pub seed: u64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            densities: TestDensity::all().to_vec(),
            models: ModelSpec::all(),
            entropy: Entropy::MaxwellBoltzmann,
            nmax: None,
            out: None,
            solver: SolverConfig {
                max_iter: STUDY_MAX_ITER,
                ..SolverConfig::default()
            },
            resolution: FineResolution::default(),
            execution: Execution::default(),
            repetitions: 20,
            warmups: 3,
            seed: 0,
        }
    }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid value `{value}` for `{key}`")))
}

impl StudyConfig {
    /// Sets one key. Known keys: `density`, `models`, `entropy`, `nmax`,
    /// `out`, `tol`, `max_iter`, `taylor_threshold`, `quad_points`,
    /// `quad_degree`, `subintervals`, `level`, `repetitions`, `warmups`,
    /// `seed`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_").to_ascii_lowercase();
        let v = value.trim();
        match key.as_str() {
            "density" | "densities" => self.densities = parse_densities(v)?,
            "models" | "model" => self.models = parse_models(v)?,
            "entropy" => self.entropy = v.parse()?,
            "nmax" => self.nmax = Some(number(&key, v)?),
            "out" => self.out = Some(PathBuf::from(v)),
            "tol" => self.solver.tol = number(&key, v)?,
            "max_iter" => self.solver.max_iter = number(&key, v)?,
            "taylor_threshold" => self.solver.taylor_threshold = number(&key, v)?,
            "quad_points" => self.resolution.points = number(&key, v)?,
            "quad_degree" => self.resolution.degree = number(&key, v)?,
            "subintervals" => self.resolution.subintervals = number(&key, v)?,
            "level" => self.resolution.level = number(&key, v)?,
            "repetitions" => self.repetitions = number(&key, v)?,
            "warmups" => self.warmups = number(&key, v)?,
            "seed" => self.seed = number(&key, v)?,
            _ => return Err(Error::Parse(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    /// Applies every `key=value` line of `text`; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value, got `{line}`", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.apply_text(&text)
    }
}
