//! Equilateral-lattice triangulation of Koch snowflakes.

use std::collections::HashMap;

use super::{check_budget, Mesh};
use crate::error::Result;
use crate::geometry::{
    koch_lattice_point, koch_lattice_vertices, BoundaryMeasure, PolygonalDomain,
};

pub(super) fn build(
    domain: &PolygonalDomain,
    sigma: &BoundaryMeasure,
    target_h: f64,
) -> Result<Mesh> {
    let pitch = domain.lattice_pitch();
    let m = ((pitch / target_h) * (1.0 - 1e-12)).ceil().max(1.0) as i64;
    let unit = pitch / m as f64;
    let tri_area = 3f64.sqrt() / 4.0 * unit * unit;
    check_budget((domain.area() / tri_area / 2.0) as usize)?;

    // Boundary in integer lattice coordinates; every lattice triangle is
    // either inside or outside.
    let poly: Vec<(i64, i64)> = koch_lattice_vertices(domain.generation())
        .into_iter()
        .map(|(i, j)| (i * m, j * m))
        .collect();
    let (jmin, jmax) = (
        poly.iter().map(|p| p.1).min().unwrap(),
        poly.iter().map(|p| p.1).max().unwrap(),
    );
    let span = jmax - jmin;
    let imin = poly.iter().map(|p| p.0).min().unwrap() - span;
    let imax = poly.iter().map(|p| p.0).max().unwrap() + span;
    let n = poly.len();
    // Crossing abscissae (lattice `i`) of the polygon with the line `j = y`.
    let crossings = |y: f64| -> Vec<f64> {
        let mut xs: Vec<f64> = (0..n)
            .filter_map(|k| {
                let (a, b) = (poly[k], poly[(k + 1) % n]);
                let (ay, by) = (a.1 as f64, b.1 as f64);
                if (ay > y) != (by > y) {
                    Some(a.0 as f64 + (y - ay) / (by - ay) * (b.0 - a.0) as f64)
                } else {
                    None
                }
            })
            .collect();
        xs.sort_by(f64::total_cmp);
        xs
    };
    let inside = |xs: &[f64], x: f64| xs.len() - xs.partition_point(|&c| c <= x);

    let mut ids: HashMap<(i64, i64), usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut vid = |i: i64, j: i64, vertices: &mut Vec<_>| -> usize {
        *ids.entry((i, j)).or_insert_with(|| {
            vertices.push(koch_lattice_point(i, j, unit));
            vertices.len() - 1
        })
    };
    let mut triangles = Vec::new();
    for j in jmin..jmax {
        let up = crossings(j as f64 + 1.0 / 3.0);
        let down = crossings(j as f64 + 2.0 / 3.0);
        for i in imin..=imax {
            if inside(&up, i as f64 + 1.0 / 3.0) % 2 == 1 {
                let t = [
                    vid(i, j, &mut vertices),
                    vid(i + 1, j, &mut vertices),
                    vid(i, j + 1, &mut vertices),
                ];
                triangles.push(t);
            }
            if inside(&down, i as f64 + 2.0 / 3.0) % 2 == 1 {
                let t = [
                    vid(i + 1, j, &mut vertices),
                    vid(i + 1, j + 1, &mut vertices),
                    vid(i, j + 1, &mut vertices),
                ];
                triangles.push(t);
            }
        }
    }
    Mesh::from_triangles(vertices, triangles, Some((domain, sigma)), 0)
}
