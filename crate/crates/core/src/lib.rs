//! Continuous (hat-function) and discontinuous (partial-moment) first-order
//! angular moment bases in slab and three-dimensional geometry, together with
//! their minimum-entropy closures and realizability theory.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] – interval partitions, spherical triangulations, hulls.
//! * [`basis`] – the seven angular basis families.
//! * [`quadrature`] – composite Gauss–Lobatto and spherical-triangle rules.
//! * [`closure`] – entropy families, the dual Newton solver, closed-form
//!   moment integrals and the linear closure.
//! * [`realizability`] – realizability verdicts, ranks and atomic witnesses.
//! * [`harness`] – density approximation studies, timing and CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod basis;
pub mod closure;
pub mod error;
pub mod geometry;
pub mod harness;
mod linalg;
pub mod parallel;
pub mod quadrature;
pub mod realizability;

pub use error::{Error, Result};
