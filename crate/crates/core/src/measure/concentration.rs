//! Lorenz curves of harmonic measure against σ on the fractal boundary part.

use std::sync::Arc;

use serde::Serialize;

use crate::error::Result;
use crate::geometry::{Point, PolygonalDomain};
use crate::mesh::Mesh;
use crate::solver::{assemble, dirichlet_harmonic_measure, CoefficientField};

/// Cumulative `(σ fraction, measure fraction)` with cells sorted by
/// decreasing density, starting at `(0, 0)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lorenz {
    pub points: Vec<(f64, f64)>,
}

/// Builds the curve from `(σ, mass)` cells; negative masses count as zero.
pub fn lorenz(cells: &[(f64, f64)]) -> Lorenz {
    let mut cells: Vec<(f64, f64)> = cells
        .iter()
        .filter(|c| c.0 > 0.0)
        .map(|&(s, m)| (s, m.max(0.0)))
        .collect();
    cells.sort_by(|p, q| (q.1 / q.0).total_cmp(&(p.1 / p.0)));
    let s_tot: f64 = cells.iter().map(|c| c.0).sum();
    let m_tot: f64 = cells.iter().map(|c| c.1).sum();
    let mut points = vec![(0.0, 0.0)];
    let (mut s, mut m) = (0.0, 0.0);
    for (cs, cm) in cells {
        s += cs;
        m += cm;
        points.push((s / s_tot, m / m_tot));
    }
    Lorenz { points }
}

impl Lorenz {
    /// Smallest σ-fraction carrying the fraction `q` of the measure.
    pub fn quantile(&self, q: f64) -> f64 {
        for w in self.points.windows(2) {
            let ((s0, m0), (s1, m1)) = (w[0], w[1]);
            if m1 >= q {
                return if m1 > m0 {
                    s0 + (q - m0) / (m1 - m0) * (s1 - s0)
                } else {
                    s0
                };
            }
        }
        1.0
    }

    pub fn s99(&self) -> f64 {
        self.quantile(0.99)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Concentration {
    pub pole: Point,
    pub a: f64,
    /// Number of Lorenz cells.
    pub cells: usize,
    pub robin: Lorenz,
    pub dirichlet: Lorenz,
    pub s99_robin: f64,
    pub s99_dirichlet: f64,
    /// Share of each measure that lands on the fractal part.
    pub robin_fractal_mass: f64,
    pub dirichlet_fractal_mass: f64,
}

/// Mesh boundary edges per Lorenz cell.
pub const GROUP_EDGES: usize = 8;

/// Boundary edges on the fractal part, in runs of [`GROUP_EDGES`]
/// consecutive edges that never cross from one component to another.
fn fractal_groups(mesh: &Mesh, domain: &PolygonalDomain) -> Vec<Vec<usize>> {
    let fractal = domain.fractal_edges();
    let mut edges: Vec<(usize, f64, usize)> = mesh
        .boundary_edges
        .iter()
        .enumerate()
        .filter_map(|(i, e)| {
            let p = e.parent.filter(|p| fractal.contains(p))?;
            let start = domain.edge(p).a;
            Some((p, mesh.vertices[e.v[0]].dist(start), i))
        })
        .collect();
    edges.sort_by(|x, y| (x.0, x.1).partial_cmp(&(y.0, y.1)).unwrap());
    let mut groups = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut component = usize::MAX;
    for (p, _, i) in edges {
        let c = domain.component_of_edge(p);
        if c != component || current.len() == GROUP_EDGES {
            if !current.is_empty() {
                groups.push(std::mem::take(&mut current));
            }
            component = c;
        }
        current.push(i);
    }
    if !current.is_empty() {
        groups.push(current);
    }
    groups
}

/// Robin and Dirichlet harmonic measure at `pole`, compared through their
/// Lorenz curves against σ on the fractal part. Each cell is a run of
/// [`GROUP_EDGES`] boundary edges; a vertex's Dirichlet mass is split evenly
/// between its two boundary edges, which amounts to hat data on the group.
pub fn dirichlet_compare(
    mesh: Arc<Mesh>,
    domain: &PolygonalDomain,
    coeff: &CoefficientField,
    a: f64,
    pole: Point,
) -> Result<Concentration> {
    let groups = fractal_groups(&mesh, domain);
    let w = assemble(mesh.clone(), coeff, a)?.harmonic_measure_density(pole)?;
    let (omega_d, _) = dirichlet_harmonic_measure(&mesh, coeff, pole)?;
    let mut robin = Vec::with_capacity(groups.len());
    let mut dirichlet = Vec::with_capacity(groups.len());
    for g in &groups {
        let (mut s, mut r, mut d) = (0.0, 0.0, 0.0);
        for &i in g {
            let e = &mesh.boundary_edges[i];
            let mass = e.density * mesh.boundary_edge_length(e);
            s += mass;
            for v in e.v {
                r += 0.5 * mass * w.weight(v);
                d += 0.5 * omega_d[v];
            }
        }
        robin.push((s, r));
        dirichlet.push((s, d));
    }
    let robin_fractal_mass = robin.iter().map(|c| c.1).sum::<f64>() / w.total;
    let dirichlet_fractal_mass =
        dirichlet.iter().map(|c| c.1).sum::<f64>() / omega_d.iter().sum::<f64>();
    let (robin, dirichlet) = (lorenz(&robin), lorenz(&dirichlet));
    Ok(Concentration {
        pole,
        a,
        cells: groups.len(),
        s99_robin: robin.s99(),
        s99_dirichlet: dirichlet.s99(),
        robin,
        dirichlet,
        robin_fractal_mass,
        dirichlet_fractal_mass,
    })
}
