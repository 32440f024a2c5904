use std::sync::Arc;

use crate::geometry::{clip_segment_to_box, clip_segment_to_disk, Point};
use crate::mesh::Mesh;

/// Subset of the σ-carrying boundary.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundarySet {
    All,
    Ball {
        center: Point,
        radius: f64,
    },
    /// Ball intersected with an axis-aligned box.
    BallBox {
        center: Point,
        radius: f64,
        lo: Point,
        hi: Point,
    },
    /// Domain edge ids, sorted.
    Edges(Vec<usize>),
}

impl BoundarySet {
    pub fn edges(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        BoundarySet::Edges(ids)
    }

    /// Parameter interval of the segment `a→b` inside the set.
    fn clip(&self, a: Point, b: Point, parent: usize) -> Option<(f64, f64)> {
        match self {
            BoundarySet::All => Some((0.0, 1.0)),
            BoundarySet::Ball { center, radius } => clip_segment_to_disk(a, b, *center, *radius),
            BoundarySet::BallBox {
                center,
                radius,
                lo,
                hi,
            } => {
                let (s0, s1) = clip_segment_to_disk(a, b, *center, *radius)?;
                let (t0, t1) = clip_segment_to_box(a, b, *lo, *hi)?;
                let (u0, u1) = (s0.max(t0), s1.min(t1));
                (u1 > u0).then_some((u0, u1))
            }
            BoundarySet::Edges(ids) => ids.binary_search(&parent).is_ok().then_some((0.0, 1.0)),
        }
    }
}

/// `Σ` over boundary half-edges of `weight(vertex) · σ(half-edge ∩ E)`.
fn half_edge_sum(mesh: &Mesh, set: &BoundarySet, weight: impl Fn(usize) -> f64) -> f64 {
    let mut total = 0.0;
    for e in &mesh.boundary_edges {
        let Some(parent) = e.parent else { continue };
        let [va, vb] = e.v;
        let (a, b) = (mesh.vertices[va], mesh.vertices[vb]);
        let Some((t0, t1)) = set.clip(a, b, parent) else {
            continue;
        };
        let mass = e.density * a.dist(b);
        let first = (t1.min(0.5) - t0).max(0.0);
        let second = (t1 - t0.max(0.5)).max(0.0);
        total += mass * (first * weight(va) + second * weight(vb));
    }
    total
}

/// Per-vertex σ-mass of the vertex's boundary half-edges lying in `set`.
pub fn vertex_set_mass(mesh: &Mesh, set: &BoundarySet) -> Vec<f64> {
    let mut out = vec![0.0; mesh.vertices.len()];
    for e in &mesh.boundary_edges {
        let Some(parent) = e.parent else { continue };
        let [va, vb] = e.v;
        let (a, b) = (mesh.vertices[va], mesh.vertices[vb]);
        let Some((t0, t1)) = set.clip(a, b, parent) else {
            continue;
        };
        let mass = e.density * a.dist(b);
        out[va] += mass * (t1.min(0.5) - t0).max(0.0);
        out[vb] += mass * (t1 - t0.max(0.5)).max(0.0);
    }
    out
}

/// Discrete σ-mass of a boundary set.
pub fn sigma_of(mesh: &Mesh, set: &BoundarySet) -> f64 {
    half_edge_sum(mesh, set, |_| 1.0)
}

/// Robin harmonic measure at a pole, as a nodal density against σ.
#[derive(Clone, Debug)]
pub struct MeasureDensity {
    mesh: Arc<Mesh>,
    pub pole: Point,
    pub a: f64,
    /// `B⁻ᵀ e_X` at every vertex; the density is its boundary trace.
    nodal: Vec<f64>,
    pub residual: f64,
    pub total: f64,
}

impl MeasureDensity {
    pub fn new(mesh: Arc<Mesh>, pole: Point, a: f64, nodal: Vec<f64>, residual: f64) -> Self {
        let total = mesh
            .boundary_vertices
            .iter()
            .map(|&v| nodal[v] * mesh.sigma_weights[v])
            .sum();
        Self {
            mesh,
            pole,
            a,
            nodal,
            residual,
            total,
        }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn weight(&self, v: usize) -> f64 {
        self.nodal[v]
    }

    /// Values at every vertex (`a·G(·, X)` in the interior).
    pub fn nodal(&self) -> &[f64] {
        &self.nodal
    }

    pub fn min_weight(&self) -> f64 {
        self.mesh
            .boundary_vertices
            .iter()
            .map(|&v| self.nodal[v])
            .fold(f64::INFINITY, f64::min)
    }

    /// `ω^X(E)`.
    pub fn omega(&self, set: &BoundarySet) -> f64 {
        half_edge_sum(&self.mesh, set, |v| self.nodal[v])
    }

    /// `⟨w, f⟩_σ`, which equals the Robin solution with data `f` at the pole.
    pub fn pair(&self, f: &[f64]) -> f64 {
        self.mesh
            .boundary_vertices
            .iter()
            .map(|&v| self.nodal[v] * self.mesh.sigma_weights[v] * f[v])
            .sum()
    }

    /// Smallest and largest weight over vertices whose half-edges meet `set`.
    pub fn weight_range(&self, set: &BoundarySet) -> Option<(f64, f64)> {
        let mut range: Option<(f64, f64)> = None;
        let mesh = &self.mesh;
        for e in &mesh.boundary_edges {
            let Some(parent) = e.parent else { continue };
            let [va, vb] = e.v;
            let Some((t0, t1)) = set.clip(mesh.vertices[va], mesh.vertices[vb], parent) else {
                continue;
            };
            for (v, hit) in [(va, t0 < 0.5), (vb, t1 > 0.5)] {
                if hit {
                    let w = self.nodal[v];
                    range = Some(range.map_or((w, w), |(lo, hi)| (lo.min(w), hi.max(w))));
                }
            }
        }
        range
    }
}
