//! Numerical laboratory for the Robin boundary-value problem on rough planar
//! domains.
//!
//! The pipeline is `geometry` (prefractal domains and boundary measures) →
//! `mesh` (conforming nonobtuse triangulations) → `solver` (the discrete form
//! `B = K/a + M_σ`, Robin/Dirichlet solves, Green columns) → `measure`
//! (Robin harmonic measure, ratio scans, Harnack and density experiments),
//! with `walker` providing an independent Monte Carlo reading of the same
//! discrete measure.

// `!(x > 0.0)` is used on purpose: NaN must fail these checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fit;
pub mod geometry;
pub mod measure;
pub mod mesh;
pub mod solver;
pub mod walker;

pub use error::{Error, Result};
pub use geometry::{
    BoundaryBall, BoundaryMeasure, BoundaryPoint, Family, Point, PolygonalDomain, RegularityReport,
    SigmaRule,
};
pub use measure::MeasureDensity;
pub use mesh::Mesh;
pub use solver::{CoefficientField, RobinSystem, Solution};
