//! Conforming nonobtuse triangulations with lumped boundary σ-weights.

mod cache;
mod disk;
mod koch;
mod locate;
mod quadtree;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{orient, BoundaryMeasure, Family, Point, PolygonalDomain, SegmentIndex};

pub use cache::{cache_path, load_or_build, read_mesh, write_mesh};
pub use locate::{Location, Locator};
pub use quadtree::Obstacle;

/// Maximum number of vertices any mesh may have.
pub const VERTEX_BUDGET: usize = 300_000;

/// Angles above 90° by more than this (degrees) count as obtuse.
const ANGLE_SLACK_DEG: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryEdge {
    /// Endpoints, ordered so that the domain lies on the left.
    pub v: [usize; 2],
    /// Domain edge this mesh edge lies on; `None` on an inner obstacle.
    pub parent: Option<usize>,
    /// σ-density against arclength (0 on an inner obstacle).
    pub density: f64,
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Sorted ids of vertices on σ-carrying boundary edges.
    pub boundary_vertices: Vec<usize>,
    /// Vertices carrying Dirichlet data (inner obstacle boundary).
    pub dirichlet_vertices: Vec<usize>,
    /// Lumped σ-mass per vertex; zero away from the boundary.
    pub sigma_weights: Vec<f64>,
    /// Longest triangle edge.
    pub h: f64,
    /// Number of interior boundary components (holes, including obstacles).
    pub num_holes: usize,
    /// Circumradius when the boundary approximates a circle around the origin.
    pub circle_radius: Option<f64>,
}

pub fn triangulate(
    domain: &PolygonalDomain,
    sigma: &BoundaryMeasure,
    target_h: f64,
) -> Result<Mesh> {
    triangulate_with_obstacle(domain, sigma, target_h, None)
}

/// Triangulates `domain` minus an optional obstacle carved from the square
/// lattice (Cantor and Square families only).
pub fn triangulate_with_obstacle(
    domain: &PolygonalDomain,
    sigma: &BoundaryMeasure,
    target_h: f64,
    obstacle: Option<&Obstacle>,
) -> Result<Mesh> {
    triangulate_with(domain, sigma, target_h, obstacle, &[])
}

/// Quadtree mesh reaching `target_h` only near the `foci`, with cells growing
/// in proportion to the distance from them.
pub fn triangulate_graded(
    domain: &PolygonalDomain,
    sigma: &BoundaryMeasure,
    target_h: f64,
    foci: &[Point],
) -> Result<Mesh> {
    triangulate_with(domain, sigma, target_h, None, foci)
}

fn triangulate_with(
    domain: &PolygonalDomain,
    sigma: &BoundaryMeasure,
    target_h: f64,
    obstacle: Option<&Obstacle>,
    foci: &[Point],
) -> Result<Mesh> {
    if !(target_h > 0.0 && target_h.is_finite()) {
        return Err(Error::InvalidArgument(format!("target_h = {target_h}")));
    }
    if target_h > domain.lattice_pitch() * (1.0 + 1e-12) && domain.family() != Family::DiskPolygon {
        return Err(Error::InvalidArgument(format!(
            "target_h {target_h} exceeds the lattice pitch {}",
            domain.lattice_pitch()
        )));
    }
    if (obstacle.is_some() || !foci.is_empty())
        && !matches!(domain.family(), Family::CantorComplement | Family::Square)
    {
        return Err(Error::InvalidArgument(
            "obstacles and grading are supported on square-lattice domains only".into(),
        ));
    }
    let mesh = match domain.family() {
        Family::CantorComplement | Family::Square => {
            quadtree::build(domain, sigma, target_h, obstacle, foci)?
        }
        Family::KochSnowflake => koch::build(domain, sigma, target_h)?,
        Family::DiskPolygon => {
            let mut m = disk::build(domain, sigma)?;
            while m.h > target_h * (1.0 + 1e-9) {
                m = refine(&m)?;
            }
            m
        }
    };
    if let Some((triangle, angle_deg)) = mesh.first_obtuse() {
        return Err(Error::NonobtuseViolation {
            triangle,
            angle_deg,
        });
    }
    Ok(mesh)
}

impl Mesh {
    /// Assembles a mesh from vertices and counterclockwise triangles,
    /// extracting boundary edges and mapping them to parent domain edges.
    pub(crate) fn from_triangles(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        domain: Option<(&PolygonalDomain, &BoundaryMeasure)>,
        num_holes: usize,
    ) -> Result<Mesh> {
        let mut edges = Vec::new();
        for (a, b) in free_edges(&triangles) {
            edges.push(BoundaryEdge {
                v: [a, b],
                parent: None,
                density: 0.0,
            });
        }
        if let Some((dom, sigma)) = domain {
            let index = SegmentIndex::new(dom.edges().collect());
            let h = max_edge(&vertices, &triangles);
            for e in &mut edges {
                let (pa, pb) = (vertices[e.v[0]], vertices[e.v[1]]);
                let mid = pa.midpoint(pb);
                if let Some((k, d)) = index.nearest(mid) {
                    let s = index.segments()[k];
                    let on_line = orient(s.a, s.b, pa).abs() <= 1e-9 * h * s.length()
                        && orient(s.a, s.b, pb).abs() <= 1e-9 * h * s.length();
                    if d <= 1e-9 * h && on_line {
                        e.parent = Some(k);
                        e.density = sigma.density(k);
                    }
                }
            }
        }
        edges.sort_by_key(|e| (e.parent.unwrap_or(usize::MAX), e.v));
        Ok(Self::with_boundary(vertices, triangles, edges, num_holes))
    }

    pub(crate) fn with_boundary(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
        num_holes: usize,
    ) -> Mesh {
        let h = max_edge(&vertices, &triangles);
        let mut mesh = Mesh {
            vertices,
            triangles,
            boundary_edges,
            boundary_vertices: Vec::new(),
            dirichlet_vertices: Vec::new(),
            sigma_weights: Vec::new(),
            h,
            num_holes,
            circle_radius: None,
        };
        mesh.recompute_boundary_data();
        mesh
    }

    fn recompute_boundary_data(&mut self) {
        let mut w = vec![0.0; self.vertices.len()];
        let mut on_sigma = vec![false; self.vertices.len()];
        let mut on_dirichlet = vec![false; self.vertices.len()];
        for e in &self.boundary_edges {
            let [a, b] = e.v;
            if e.parent.is_some() {
                let half = 0.5 * e.density * self.vertices[a].dist(self.vertices[b]);
                w[a] += half;
                w[b] += half;
                on_sigma[a] = true;
                on_sigma[b] = true;
            } else {
                on_dirichlet[a] = true;
                on_dirichlet[b] = true;
            }
        }
        self.sigma_weights = w;
        self.boundary_vertices = (0..self.vertices.len()).filter(|&v| on_sigma[v]).collect();
        self.dirichlet_vertices = (0..self.vertices.len())
            .filter(|&v| on_dirichlet[v])
            .collect();
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        0.5 * orient(a, b, c)
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    pub fn sigma_total(&self) -> f64 {
        self.sigma_weights.iter().sum()
    }

    pub fn boundary_edge_length(&self, e: &BoundaryEdge) -> f64 {
        self.vertices[e.v[0]].dist(self.vertices[e.v[1]])
    }

    /// Largest interior angle (degrees) over all triangles.
    pub fn max_angle_deg(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| max_angle(&self.triangle_points(t)))
            .fold(0.0, f64::max)
    }

    fn first_obtuse(&self) -> Option<(usize, f64)> {
        (0..self.triangles.len()).find_map(|t| {
            let a = max_angle(&self.triangle_points(t));
            (a > 90.0 + ANGLE_SLACK_DEG).then_some((t, a))
        })
    }

    /// Number of distinct undirected edges.
    pub fn num_edges(&self) -> usize {
        let mut set = std::collections::HashSet::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                set.insert((a.min(b), a.max(b)));
            }
        }
        set.len()
    }

    /// Checks that every triangle edge is shared by two triangles with
    /// opposite orientation, or is a listed boundary edge.
    pub fn check_conforming(&self) -> Result<()> {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                if directed.insert((tri[k], tri[(k + 1) % 3]), t).is_some() {
                    return Err(Error::InvalidArgument(format!(
                        "edge {:?} appears twice with the same orientation",
                        (tri[k], tri[(k + 1) % 3])
                    )));
                }
            }
        }
        let listed: std::collections::HashSet<(usize, usize)> = self
            .boundary_edges
            .iter()
            .map(|e| (e.v[0], e.v[1]))
            .collect();
        for &(a, b) in directed.keys() {
            let twin = directed.contains_key(&(b, a));
            if !twin && !listed.contains(&(a, b)) {
                return Err(Error::InvalidArgument(format!(
                    "edge ({a}, {b}) is unmatched and not on the boundary"
                )));
            }
            if twin && listed.contains(&(a, b)) {
                return Err(Error::InvalidArgument(format!(
                    "boundary edge ({a}, {b}) is shared by two triangles"
                )));
            }
        }
        if listed.len() != self.boundary_edges.len()
            || listed.iter().any(|k| !directed.contains_key(k))
        {
            return Err(Error::InvalidArgument(
                "boundary edge list does not match the triangulation".into(),
            ));
        }
        Ok(())
    }

    /// Vertex adjacency (excluding the vertex itself), sorted.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
        }
        adj
    }

    pub fn locate(&self, p: Point) -> Result<Location> {
        Locator::new(self).locate(self, p)
    }

    pub fn vertex_nearest(&self, p: Point) -> usize {
        (0..self.vertices.len())
            .min_by(|&a, &b| {
                self.vertices[a]
                    .dist(p)
                    .total_cmp(&self.vertices[b].dist(p))
            })
            .unwrap()
    }
}

fn max_angle(p: &[Point; 3]) -> f64 {
    let mut best = 0.0f64;
    for k in 0..3 {
        let a = p[k];
        let u = p[(k + 1) % 3] - a;
        let v = p[(k + 2) % 3] - a;
        let ang = u.cross(v).abs().atan2(u.dot(v)).to_degrees();
        best = best.max(ang);
    }
    best
}

fn max_edge(vertices: &[Point], triangles: &[[usize; 3]]) -> f64 {
    triangles
        .iter()
        .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
        .map(|(a, b)| vertices[a].dist(vertices[b]))
        .fold(0.0, f64::max)
}

/// Directed triangle edges with no oppositely oriented twin.
fn free_edges(triangles: &[[usize; 3]]) -> Vec<(usize, usize)> {
    let mut directed = std::collections::HashSet::new();
    for t in triangles {
        for k in 0..3 {
            directed.insert((t[k], t[(k + 1) % 3]));
        }
    }
    let mut out: Vec<(usize, usize)> = directed
        .iter()
        .filter(|&&(a, b)| !directed.contains(&(b, a)))
        .copied()
        .collect();
    out.sort_unstable();
    out
}

fn check_budget(projected: usize) -> Result<()> {
    if projected > VERTEX_BUDGET {
        Err(Error::SizeExceeded {
            projected,
            budget: VERTEX_BUDGET,
        })
    } else {
        Ok(())
    }
}

/// Midpoint refinement shared by `refine` and `refine_onto_circle`.
fn red_refine(mesh: &Mesh, project: Option<f64>) -> Result<Mesh> {
    check_budget(mesh.vertices.len() + mesh.num_edges())?;
    let mut vertices = mesh.vertices.clone();
    let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
    let boundary: HashMap<(usize, usize), &BoundaryEdge> = mesh
        .boundary_edges
        .iter()
        .map(|e| ((e.v[0].min(e.v[1]), e.v[0].max(e.v[1])), e))
        .collect();
    let mut mid = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
        let key = (a.min(b), a.max(b));
        *mids.entry(key).or_insert_with(|| {
            let mut p = vertices[a].midpoint(vertices[b]);
            if let (Some(r), Some(e)) = (project, boundary.get(&key)) {
                if e.parent.is_some() {
                    p = p * (r / p.norm());
                }
            }
            vertices.push(p);
            vertices.len() - 1
        })
    };
    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    for &[a, b, c] in &mesh.triangles {
        let ab = mid(a, b, &mut vertices);
        let bc = mid(b, c, &mut vertices);
        let ca = mid(c, a, &mut vertices);
        triangles.extend_from_slice(&[[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
    }
    let mut edges = Vec::with_capacity(2 * mesh.boundary_edges.len());
    for e in &mesh.boundary_edges {
        let [a, b] = e.v;
        let m = mids[&(a.min(b), a.max(b))];
        edges.push(BoundaryEdge { v: [a, m], ..*e });
        edges.push(BoundaryEdge { v: [m, b], ..*e });
    }
    let mut out = Mesh::with_boundary(vertices, triangles, edges, mesh.num_holes);
    out.circle_radius = mesh.circle_radius;
    Ok(out)
}

/// Uniform red refinement: every triangle splits into four similar children.
pub fn refine(mesh: &Mesh) -> Result<Mesh> {
    red_refine(mesh, None)
}

/// Red refinement that moves new midpoints of σ-carrying boundary edges onto
/// the circle the boundary approximates, so the discrete boundary converges to
/// the circle under repeated refinement.
pub fn refine_onto_circle(mesh: &Mesh) -> Result<Mesh> {
    let r = mesh.circle_radius.ok_or_else(|| {
        Error::InvalidArgument("mesh boundary does not approximate a circle".into())
    })?;
    let out = red_refine(mesh, Some(r))?;
    if let Some((triangle, angle_deg)) = out.first_obtuse() {
        return Err(Error::NonobtuseViolation {
            triangle,
            angle_deg,
        });
    }
    Ok(out)
}
