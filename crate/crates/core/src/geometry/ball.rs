use serde::{Deserialize, Serialize};

use super::domain::PolygonalDomain;
use super::point::{clip_segment_to_disk, Point};
use super::sigma::BoundaryMeasure;
use crate::error::{Error, Result};

/// A point on the boundary given as a domain edge id and a parameter in [0, 1].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub edge: usize,
    pub t: f64,
}

impl BoundaryPoint {
    pub fn new(edge: usize, t: f64) -> Self {
        Self { edge, t }
    }

    pub fn position(&self, domain: &PolygonalDomain) -> Point {
        domain.edge(self.edge).at(self.t)
    }

    /// The boundary point at arclength `s` along the edges `edges`, in order.
    pub fn at_arclength(
        domain: &PolygonalDomain,
        edges: std::ops::Range<usize>,
        mut s: f64,
    ) -> BoundaryPoint {
        let last = edges.end - 1;
        for e in edges {
            let len = domain.edge(e).length();
            if s <= len || e == last {
                return BoundaryPoint::new(e, (s / len).clamp(0.0, 1.0));
            }
            s -= len;
        }
        unreachable!("empty edge range")
    }
}

/// The boundary trace `B(x0, r) ∩ ∂Ω`.
#[derive(Clone, Debug)]
pub struct BoundaryBall {
    pub center: BoundaryPoint,
    pub center_point: Point,
    pub radius: f64,
    /// Edges whose midpoint lies strictly inside the disk.
    pub edge_set: Vec<usize>,
    /// σ-mass of the exact clipping of every edge to the closed disk.
    pub sigma_mass: f64,
}

/// Mass of `edge ∩ B(c, r)`.
pub fn clipped_edge_mass(
    domain: &PolygonalDomain,
    sigma: &BoundaryMeasure,
    edge: usize,
    c: Point,
    r: f64,
) -> f64 {
    let s = domain.edge(edge);
    clip_segment_to_disk(s.a, s.b, c, r)
        .map_or(0.0, |(t0, t1)| (t1 - t0) * s.length() * sigma.density(edge))
}

pub fn ball_trace(
    domain: &PolygonalDomain,
    sigma: &BoundaryMeasure,
    x0: BoundaryPoint,
    r: f64,
) -> Result<BoundaryBall> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("ball radius {r}")));
    }
    let c = x0.position(domain);
    let mut edge_set = Vec::new();
    let mut mass = 0.0;
    for e in 0..domain.num_edges() {
        let seg = domain.edge(e);
        if seg.midpoint().dist(c) < r {
            edge_set.push(e);
        }
        mass += clipped_edge_mass(domain, sigma, e, c, r);
    }
    Ok(BoundaryBall {
        center: x0,
        center_point: c,
        radius: r,
        edge_set,
        sigma_mass: mass.min(sigma.total_mass),
    })
}
