//! Lower density bounds and the active-boundary experiment.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::density::{sigma_of, BoundarySet};
use crate::error::Result;
use crate::fit::{linear_fit, range, LinearFit};
use crate::geometry::Point;
use crate::mesh::Mesh;
use crate::solver::{assemble, CoefficientField, RobinSystem};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityRow {
    pub a: f64,
    /// `a·σ(B(x0, r))`.
    pub a_sigma: f64,
    /// Smallest nodal value on `Ω ∩ B(x0, r)`.
    pub min_u: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityScan {
    pub x0: Point,
    pub r: f64,
    pub k: f64,
    pub sigma_ball: f64,
    pub rows: Vec<DensityRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityFit {
    pub fit: LinearFit,
    pub relative_residual: f64,
    pub points: usize,
}

/// `m(a) = min_{Ω∩B(x0,r)} u_a` for data `f = 1` on `B(x0, k·r) ∩ ∂Ω` and
/// `f = 0` elsewhere.
pub fn density_bound_scan(
    mesh: Arc<Mesh>,
    coeff: &CoefficientField,
    a_grid: &[f64],
    x0: Point,
    r: f64,
    k: f64,
) -> Result<DensityScan> {
    let f: Vec<f64> = mesh
        .vertices
        .iter()
        .map(|p| if p.dist(x0) <= k * r { 1.0 } else { 0.0 })
        .collect();
    let sigma_ball = sigma_of(
        &mesh,
        &BoundarySet::Ball {
            center: x0,
            radius: r,
        },
    );
    let nodes: Vec<usize> = (0..mesh.vertices.len())
        .filter(|&v| mesh.vertices[v].dist(x0) <= r)
        .collect();
    let rows = a_grid
        .par_iter()
        .map(|&a| {
            let u = assemble(mesh.clone(), coeff, a)?.solve_robin(&f)?;
            let min_u = nodes
                .iter()
                .map(|&v| u.nodal_values[v])
                .fold(f64::INFINITY, f64::min);
            Ok(DensityRow {
                a,
                a_sigma: a * sigma_ball,
                min_u,
                residual: u.residual_norm,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityScan {
        x0,
        r,
        k,
        sigma_ball,
        rows,
    })
}

impl DensityScan {
    /// Least-squares line of `log m(a)` against `1/(a·σ(B))` over rows with
    /// `a·σ(B) ∈ [lo, hi]`.
    pub fn fit(&self, lo: f64, hi: f64) -> Result<DensityFit> {
        let (x, y): (Vec<f64>, Vec<f64>) = self
            .rows
            .iter()
            .filter(|r| r.a_sigma >= lo * (1.0 - 1e-12) && r.a_sigma <= hi * (1.0 + 1e-12))
            .map(|r| (1.0 / r.a_sigma, r.min_u.ln()))
            .unzip();
        let fit = linear_fit(&x, &y)?;
        Ok(DensityFit {
            relative_residual: fit.relative_residual(range(&x)),
            points: x.len(),
            fit,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ActiveRecord {
    pub a: f64,
    /// `min` of the solution over the σ-carrying boundary.
    pub delta: f64,
    pub residual: f64,
}

/// Solves with `u = 1` on the inner obstacle and homogeneous Robin data on
/// `∂Ω`, returning the smallest boundary value.
pub fn active_boundary(system: &RobinSystem) -> Result<ActiveRecord> {
    let mesh = &system.mesh;
    let mut f = vec![0.0; mesh.vertices.len()];
    for &v in &mesh.dirichlet_vertices {
        f[v] = 1.0;
    }
    let u = system.solve_robin(&f)?;
    let delta = mesh
        .boundary_vertices
        .iter()
        .map(|&v| u.nodal_values[v])
        .fold(f64::INFINITY, f64::min);
    Ok(ActiveRecord {
        a: system.a,
        delta,
        residual: u.residual_norm,
    })
}
