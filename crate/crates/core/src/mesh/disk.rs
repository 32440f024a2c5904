//! Ring triangulation of regular polygons inscribed in a circle.
//!
//! Rings are staggered by half an angular step and shrink by
//! `q = cos(π/N) − √3 sin(π/N)`, which keeps the triangles close to
//! equilateral. When the ring chord drops below half the boundary chord the
//! vertex count halves through a transition layer. Small rings close with a
//! fan around the center.

use std::f64::consts::PI;

use super::Mesh;
use crate::error::{Error, Result};
use crate::geometry::{orient, BoundaryMeasure, Point, PolygonalDomain};

pub(super) fn build(domain: &PolygonalDomain, sigma: &BoundaryMeasure) -> Result<Mesh> {
    let radius = domain
        .disk_radius()
        .ok_or_else(|| Error::InvalidArgument("not a disk polygon".into()))?;
    let n = domain.outer().len();
    let mut vertices: Vec<Point> = domain.outer().to_vec();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    if n == 3 {
        triangles.push([0, 1, 2]);
    } else {
        let chord_b = 2.0 * radius * (PI / n as f64).sin();
        let mut ring: Vec<usize> = (0..n).collect();
        let mut rho = radius;
        let mut phi = domain.outer()[0].y.atan2(domain.outer()[0].x);
        loop {
            let big_n = ring.len();
            let step = 2.0 * PI / big_n as f64;
            let chord = 2.0 * rho * (PI / big_n as f64).sin();
            let can_halve = big_n.is_multiple_of(2) && big_n >= 16;
            if big_n <= 8 || (!can_halve && rho <= 1.3 * chord_b) {
                vertices.push(Point::default());
                let c = vertices.len() - 1;
                for k in 0..big_n {
                    triangles.push([c, ring[k], ring[(k + 1) % big_n]]);
                }
                break;
            }
            if can_halve && chord < 0.5 * chord_b {
                let inner_rho = rho - 1.2 * chord;
                let half = big_n / 2;
                let inner: Vec<usize> = (0..half)
                    .map(|k| {
                        vertices.push(Point::polar(inner_rho, phi + (2 * k + 1) as f64 * step));
                        vertices.len() - 1
                    })
                    .collect();
                for k in 0..half {
                    let o = |i: usize| ring[i % big_n];
                    triangles.push([inner[k], o(2 * k), o(2 * k + 1)]);
                    triangles.push([inner[k], o(2 * k + 1), o(2 * k + 2)]);
                    triangles.push([inner[k], o(2 * k + 2), inner[(k + 1) % half]]);
                }
                ring = inner;
                rho = inner_rho;
                phi += step;
            } else {
                let q = (PI / big_n as f64).cos() - 3f64.sqrt() * (PI / big_n as f64).sin();
                let inner_rho = q * rho;
                let inner_phi = phi + 0.5 * step;
                let inner: Vec<usize> = (0..big_n)
                    .map(|k| {
                        vertices.push(Point::polar(inner_rho, inner_phi + k as f64 * step));
                        vertices.len() - 1
                    })
                    .collect();
                for k in 0..big_n {
                    let k1 = (k + 1) % big_n;
                    triangles.push([ring[k], ring[k1], inner[k]]);
                    triangles.push([inner[k], ring[k1], inner[k1]]);
                }
                ring = inner;
                rho = inner_rho;
                phi = inner_phi;
            }
        }
    }
    for t in &mut triangles {
        if orient(vertices[t[0]], vertices[t[1]], vertices[t[2]]) < 0.0 {
            t.swap(1, 2);
        }
    }
    let mut mesh = Mesh::from_triangles(vertices, triangles, Some((domain, sigma)), 0)?;
    mesh.circle_radius = Some(radius);
    Ok(mesh)
}
