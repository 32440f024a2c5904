use super::Mesh;
use crate::error::{Error, Result};
use crate::geometry::{orient, Point};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Location {
    pub triangle: usize,
    /// Barycentric coordinates with respect to the triangle's vertices.
    pub bary: [f64; 3],
}

/// Bucket grid of triangle bounding boxes.
#[derive(Clone, Debug)]
pub struct Locator {
    lo: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl Locator {
    pub fn new(mesh: &Mesh) -> Self {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &mesh.vertices {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        let n = (mesh.triangles.len() as f64).sqrt().ceil().max(1.0);
        let cell = ((hi.x - lo.x).max(hi.y - lo.y) / n).max(1e-300);
        let nx = ((hi.x - lo.x) / cell).floor() as usize + 1;
        let ny = ((hi.y - lo.y) / cell).floor() as usize + 1;
        let mut buckets = vec![Vec::new(); nx * ny];
        let idx =
            |v: f64, o: f64, n: usize| (((v - o) / cell).floor().max(0.0) as usize).min(n - 1);
        for t in 0..mesh.triangles.len() {
            let p = mesh.triangle_points(t);
            let (x0, x1) = (
                p.iter().map(|q| q.x).fold(f64::INFINITY, f64::min),
                p.iter().map(|q| q.x).fold(f64::NEG_INFINITY, f64::max),
            );
            let (y0, y1) = (
                p.iter().map(|q| q.y).fold(f64::INFINITY, f64::min),
                p.iter().map(|q| q.y).fold(f64::NEG_INFINITY, f64::max),
            );
            for j in idx(y0, lo.y, ny)..=idx(y1, lo.y, ny) {
                for i in idx(x0, lo.x, nx)..=idx(x1, lo.x, nx) {
                    buckets[j * nx + i].push(t as u32);
                }
            }
        }
        Self {
            lo,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    pub fn locate(&self, mesh: &Mesh, p: Point) -> Result<Location> {
        let outside = Error::PointOutside { x: p.x, y: p.y };
        let i = ((p.x - self.lo.x) / self.cell).floor();
        let j = ((p.y - self.lo.y) / self.cell).floor();
        if i < -1.0 || j < -1.0 || i > self.nx as f64 || j > self.ny as f64 {
            return Err(outside);
        }
        let i = (i.max(0.0) as usize).min(self.nx - 1);
        let j = (j.max(0.0) as usize).min(self.ny - 1);
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &t in &self.buckets[j * self.nx + i] {
            let t = t as usize;
            let [a, b, c] = mesh.triangle_points(t);
            let area = orient(a, b, c);
            let l = [
                orient(p, b, c) / area,
                orient(a, p, c) / area,
                orient(a, b, p) / area,
            ];
            let worst = l.iter().copied().fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(_, _, w)| worst > w) {
                best = Some((t, l, worst));
            }
        }
        match best {
            Some((t, l, worst)) if worst >= -1e-12 => {
                let mut l = l.map(|v| v.max(0.0));
                let s: f64 = l.iter().sum();
                l.iter_mut().for_each(|v| *v /= s);
                Ok(Location {
                    triangle: t,
                    bary: l,
                })
            }
            _ => Err(outside),
        }
    }
}

impl Location {
    pub fn vertices(&self, mesh: &Mesh) -> [usize; 3] {
        mesh.triangles[self.triangle]
    }

    pub fn point(&self, mesh: &Mesh) -> Point {
        let p = mesh.triangle_points(self.triangle);
        p[0] * self.bary[0] + p[1] * self.bary[1] + p[2] * self.bary[2]
    }

    /// Interpolates nodal values at the located point.
    pub fn interpolate(&self, mesh: &Mesh, values: &[f64]) -> f64 {
        let v = self.vertices(mesh);
        (0..3).map(|k| self.bary[k] * values[v[k]]).sum()
    }
}
