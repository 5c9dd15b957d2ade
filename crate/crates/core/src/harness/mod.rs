//! Approximation experiments: prescribed densities, convergence tables and
//! solver timings.

mod config;
mod densities;
mod models;
mod output;
mod study;

pub use config::{StudyConfig, STUDY_MAX_ITER};
pub use densities::{parse_densities, TestDensity, VACUUM_DENSITY};
pub use models::{parse_models, ModelKind, ModelSpec};
pub use output::{emit_csv, read_csv, write_csv, CSV_HEADER};
pub use study::{
    approximation_error, assign_orders, convergence_study, empirical_order, reference_moments, reference_moments_on,
    sample_density, scaling_exponent, timing_benchmark, timing_indices, Approximation, ExperimentRow, StudyTable,
};
