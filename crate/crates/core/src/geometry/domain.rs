use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::point::{segment_distance, Point};
use crate::error::{Error, Result};

pub const MAX_CANTOR_GENERATION: u32 = 8;
pub const MAX_KOCH_GENERATION: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    CantorComplement,
    KochSnowflake,
    Square,
    DiskPolygon,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::CantorComplement => "cantor",
            Family::KochSnowflake => "koch",
            Family::Square => "square",
            Family::DiskPolygon => "disk",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "cantor" | "cantor_complement" => Some(Family::CantorComplement),
            "koch" | "koch_snowflake" => Some(Family::KochSnowflake),
            "square" => Some(Family::Square),
            "disk" | "disk_polygon" => Some(Family::DiskPolygon),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Reference shapes for oracle tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceKind {
    Square,
    DiskPolygon,
}

/// A bounded planar domain whose boundary is a union of closed polylines.
///
/// Component 0 is the outer boundary (counterclockwise); the remaining
/// components are holes (clockwise), so the domain always lies to the left of
/// every boundary edge. Edge `i` of component `c` joins vertex `i` to vertex
/// `i + 1 (mod len)`; global edge ids run through the components in order.
#[derive(Clone, Debug)]
pub struct PolygonalDomain {
    components: Vec<Vec<Point>>,
    generation: u32,
    family: Family,
    lattice_pitch: f64,
    base_scale: f64,
    offsets: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn midpoint(&self) -> Point {
        self.a.midpoint(self.b)
    }

    pub fn at(&self, t: f64) -> Point {
        self.a.lerp(self.b, t)
    }
}

impl PolygonalDomain {
    pub fn from_parts(
        components: Vec<Vec<Point>>,
        generation: u32,
        family: Family,
        lattice_pitch: f64,
        base_scale: f64,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("domain has no components".into()));
        }
        if let Some(c) = components.iter().find(|c| c.len() < 3) {
            return Err(Error::InvalidArgument(format!(
                "component with {} vertices",
                c.len()
            )));
        }
        if !(lattice_pitch > 0.0 && base_scale > 0.0) {
            return Err(Error::InvalidArgument(
                "lattice pitch and base scale must be positive".into(),
            ));
        }
        let mut offsets = Vec::with_capacity(components.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for c in &components {
            acc += c.len();
            offsets.push(acc);
        }
        Ok(Self {
            components,
            generation,
            family,
            lattice_pitch,
            base_scale,
            offsets,
        })
    }

    pub fn components(&self) -> &[Vec<Point>] {
        &self.components
    }

    pub fn outer(&self) -> &[Point] {
        &self.components[0]
    }

    pub fn holes(&self) -> &[Vec<Point>] {
        &self.components[1..]
    }

    pub fn num_holes(&self) -> usize {
        self.components.len() - 1
    }

    pub fn generation(&self) -> u32 {
        self.generation
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn lattice_pitch(&self) -> f64 {
        self.lattice_pitch
    }

    pub fn base_scale(&self) -> f64 {
        self.base_scale
    }

    pub fn num_edges(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Global id range of the edges of component `c`.
    pub fn component_edges(&self, c: usize) -> std::ops::Range<usize> {
        self.offsets[c]..self.offsets[c + 1]
    }

    pub fn component_of_edge(&self, id: usize) -> usize {
        self.offsets.partition_point(|&o| o <= id) - 1
    }

    pub fn edge(&self, id: usize) -> Segment {
        let c = self.component_of_edge(id);
        let comp = &self.components[c];
        let i = id - self.offsets[c];
        Segment {
            a: comp[i],
            b: comp[(i + 1) % comp.len()],
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        self.components.iter().flat_map(|comp| {
            (0..comp.len()).map(move |i| Segment {
                a: comp[i],
                b: comp[(i + 1) % comp.len()],
            })
        })
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|e| e.length()).sum()
    }

    /// Shoelace area; holes are clockwise and subtract themselves.
    pub fn area(&self) -> f64 {
        self.components.iter().map(|c| signed_area(c)).sum()
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        bbox(self.outer())
    }

    pub fn diameter(&self) -> f64 {
        point_set_diameter(self.outer())
    }

    /// Components making up the rough part of the boundary: the holes of a
    /// Cantor complement, the whole boundary otherwise.
    pub fn fractal_components(&self) -> std::ops::Range<usize> {
        match self.family {
            Family::CantorComplement => 1..self.components.len(),
            _ => 0..self.components.len(),
        }
    }

    pub fn fractal_edges(&self) -> std::ops::Range<usize> {
        let r = self.fractal_components();
        self.offsets[r.start]..self.offsets[r.end]
    }

    pub fn fractal_diameter(&self) -> f64 {
        let pts: Vec<Point> = self.components[self.fractal_components()]
            .iter()
            .flatten()
            .copied()
            .collect();
        point_set_diameter(&pts)
    }

    /// Even-odd point-in-domain test.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for e in self.edges() {
            if (e.a.y > p.y) != (e.b.y > p.y) {
                let x = e.a.x + (p.y - e.a.y) / (e.b.y - e.a.y) * (e.b.x - e.a.x);
                if x > p.x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        self.edges()
            .map(|e| segment_distance(p, e.a, e.b).0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let components = self
            .components
            .iter()
            .map(|c| c.iter().map(|p| *p * factor).collect())
            .collect();
        Self {
            components,
            generation: self.generation,
            family: self.family,
            lattice_pitch: self.lattice_pitch * factor,
            base_scale: self.base_scale * factor,
            offsets: self.offsets.clone(),
        }
    }

    /// Short content hash used to key mesh caches.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(super::format::write_domain(self).as_bytes());
        hasher.finalize()[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Circumradius for disk polygons (all vertices lie on this circle around
    /// the origin).
    pub fn disk_radius(&self) -> Option<f64> {
        (self.family == Family::DiskPolygon).then(|| self.outer()[0].norm())
    }
}

pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    0.5 * (0..n)
        .map(|i| poly[i].cross(poly[(i + 1) % n]))
        .sum::<f64>()
}

pub fn bbox(pts: &[Point]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

fn convex_hull(pts: &[Point]) -> Vec<Point> {
    let mut p: Vec<Point> = pts.to_vec();
    p.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for &q in iter {
            while hull.len() >= start + 2
                && super::point::orient(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0
            {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    hull
}

pub fn point_set_diameter(pts: &[Point]) -> f64 {
    let hull = convex_hull(pts);
    let mut best = 0.0f64;
    for i in 0..hull.len() {
        for j in i + 1..hull.len() {
            best = best.max(hull[i].dist(hull[j]));
        }
    }
    best
}

fn axis_square(lo: Point, side: f64, ccw: bool) -> Vec<Point> {
    let v = vec![
        lo,
        Point::new(lo.x + side, lo.y),
        Point::new(lo.x + side, lo.y + side),
        Point::new(lo.x, lo.y + side),
    ];
    if ccw {
        v
    } else {
        vec![v[0], v[3], v[2], v[1]]
    }
}

/// Lower-left corners of the `4^g` generation-`g` squares of the four-corner
/// Cantor construction started from `[lo, lo + side]^2`.
pub fn cantor_squares(lo: Point, side: f64, generation: u32) -> Vec<Point> {
    let mut squares = vec![lo];
    let mut s = side;
    for _ in 0..generation {
        let child = s / 4.0;
        let off = s - child;
        squares = squares
            .iter()
            .flat_map(|&p| {
                [
                    p,
                    Point::new(p.x + off, p.y),
                    Point::new(p.x, p.y + off),
                    Point::new(p.x + off, p.y + off),
                ]
            })
            .collect();
        s = child;
    }
    squares
}

/// Complement of the generation-`g` four-corner Cantor prefractal inside an
/// axis-aligned outer square.
///
/// The starting square is `[-L/2, L/2]^2` with `L = base_scale`; the outer
/// boundary is the square of half-side `outer_radius`, rounded up to a
/// multiple of `L/2` so that every vertex sits on the meshing lattice.
pub fn gen_cantor_complement(
    generation: u32,
    outer_radius: f64,
    base_scale: f64,
) -> Result<PolygonalDomain> {
    if generation > MAX_CANTOR_GENERATION {
        return Err(Error::GenerationTooLarge {
            generation,
            max: MAX_CANTOR_GENERATION,
        });
    }
    let l = base_scale;
    if !(outer_radius >= 2.0 * l - 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "outer radius {outer_radius} must be at least 2L = {}",
            2.0 * l
        )));
    }
    let half = (outer_radius / (0.5 * l) - 1e-9).ceil() * 0.5 * l;
    let mut components = vec![axis_square(Point::new(-half, -half), 2.0 * half, true)];
    let side = l * 0.25f64.powi(generation as i32);
    for lo in cantor_squares(Point::new(-0.5 * l, -0.5 * l), l, generation) {
        components.push(axis_square(lo, side, false));
    }
    PolygonalDomain::from_parts(components, generation, Family::CantorComplement, side, l)
}

/// Integer coordinates of the generation-`g` Koch snowflake in the triangular
/// lattice basis `e1 = (1, 0)`, `e2 = (1/2, √3/2)` with unit `L 3^{-g}`.
pub fn koch_lattice_vertices(generation: u32) -> Vec<(i64, i64)> {
    let n = 3i64.pow(generation);
    let mut poly = vec![(0, 0), (n, 0), (0, n)];
    for _ in 0..generation {
        let mut next = Vec::with_capacity(poly.len() * 4);
        for i in 0..poly.len() {
            let a = poly[i];
            let b = poly[(i + 1) % poly.len()];
            let d = ((b.0 - a.0) / 3, (b.1 - a.1) / 3);
            let p1 = (a.0 + d.0, a.1 + d.1);
            // Rotation by -60 degrees in the lattice basis: (x, y) -> (x + y, -x).
            let r = (d.0 + d.1, -d.0);
            let tip = (p1.0 + r.0, p1.1 + r.1);
            let p2 = (p1.0 + d.0, p1.1 + d.1);
            next.extend_from_slice(&[a, p1, tip, p2]);
        }
        poly = next;
    }
    poly
}

pub fn koch_lattice_point(i: i64, j: i64, unit: f64) -> Point {
    Point::new(
        unit * (i as f64 + 0.5 * j as f64),
        unit * (j as f64) * 3f64.sqrt() * 0.5,
    )
}

/// Generation-`g` Koch snowflake built on the equilateral triangle of side
/// `base_scale` with vertices `(0,0)`, `(L,0)`, `(L/2, L√3/2)`.
pub fn gen_koch_snowflake(generation: u32, base_scale: f64) -> Result<PolygonalDomain> {
    if generation > MAX_KOCH_GENERATION {
        return Err(Error::GenerationTooLarge {
            generation,
            max: MAX_KOCH_GENERATION,
        });
    }
    let unit = base_scale / 3f64.powi(generation as i32);
    let outer = koch_lattice_vertices(generation)
        .into_iter()
        .map(|(i, j)| koch_lattice_point(i, j, unit))
        .collect();
    PolygonalDomain::from_parts(
        vec![outer],
        generation,
        Family::KochSnowflake,
        unit,
        base_scale,
    )
}

/// Unit square `[0,1]^2` or the regular `n_edges`-gon inscribed in the unit
/// circle (vertex `k` at angle `2πk/n`).
pub fn gen_reference(kind: ReferenceKind, n_edges: usize) -> Result<PolygonalDomain> {
    match kind {
        ReferenceKind::Square => PolygonalDomain::from_parts(
            vec![axis_square(Point::default(), 1.0, true)],
            0,
            Family::Square,
            1.0,
            1.0,
        ),
        ReferenceKind::DiskPolygon => {
            if n_edges < 3 {
                return Err(Error::InvalidArgument(format!(
                    "a disk polygon needs at least 3 edges, got {n_edges}"
                )));
            }
            let outer = (0..n_edges)
                .map(|k| Point::polar(1.0, 2.0 * PI * k as f64 / n_edges as f64))
                .collect();
            PolygonalDomain::from_parts(
                vec![outer],
                0,
                Family::DiskPolygon,
                2.0 * (PI / n_edges as f64).sin(),
                1.0,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn segments_cross(a: Segment, b: Segment) -> bool {
        use super::super::point::orient;
        let d1 = orient(a.a, a.b, b.a);
        let d2 = orient(a.a, a.b, b.b);
        let d3 = orient(b.a, b.b, a.a);
        let d4 = orient(b.a, b.b, a.b);
        d1 * d2 < 0.0 && d3 * d4 < 0.0
    }

    #[test]
    fn cantor_base_case() {
        let d = gen_cantor_complement(0, 2.0, 1.0).unwrap();
        assert_eq!(d.components().len(), 2);
        assert_eq!(d.holes()[0].len(), 4);
        assert_eq!(d.component_edges(1).len(), 4);
    }

    #[test]
    fn cantor_generation_two_counts() {
        let d = gen_cantor_complement(2, 2.0, 1.0).unwrap();
        assert_eq!(d.num_holes(), 16);
        let hole_len: f64 = (1..17)
            .flat_map(|c| d.component_edges(c))
            .map(|e| d.edge(e).length())
            .sum();
        assert!((hole_len - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cantor_generation_one_corners() {
        let d = gen_cantor_complement(1, 2.0, 1.0).unwrap();
        let mut corners: Vec<(f64, f64)> = d
            .holes()
            .iter()
            .map(|h| {
                let (lo, hi) = bbox(h);
                assert!((hi.x - lo.x - 0.25).abs() < 1e-15);
                assert!((hi.y - lo.y - 0.25).abs() < 1e-15);
                (lo.x, lo.y)
            })
            .collect();
        corners.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(
            corners,
            vec![(-0.5, -0.5), (-0.5, 0.25), (0.25, -0.5), (0.25, 0.25)]
        );
    }

    #[test]
    fn cantor_rejects_deep_generation_and_small_outer() {
        assert!(matches!(
            gen_cantor_complement(9, 2.0, 1.0),
            Err(Error::GenerationTooLarge { .. })
        ));
        assert!(gen_cantor_complement(1, 1.0, 1.0).is_err());
    }

    #[test]
    fn hole_counts_follow_recursion() {
        for g in 0..=5 {
            let d = gen_cantor_complement(g, 2.0, 1.0).unwrap();
            assert_eq!(d.num_holes(), 4usize.pow(g));
        }
        for g in 0..=5 {
            let d = gen_koch_snowflake(g, 1.0).unwrap();
            assert_eq!(d.num_edges(), 3 * 4usize.pow(g));
        }
    }

    #[test]
    fn koch_edges_on_lattice_directions() {
        let d = gen_koch_snowflake(3, 1.0).unwrap();
        assert_eq!(d.num_edges(), 192);
        let pitch = d.lattice_pitch();
        for e in d.edges() {
            assert!((e.length() - pitch).abs() < 1e-12);
            let ang = (e.b.y - e.a.y).atan2(e.b.x - e.a.x).to_degrees();
            let k = (ang / 60.0).round();
            assert!((ang - 60.0 * k).abs() < 1e-9, "angle {ang}");
        }
        // Brute enumeration of the perimeter recursion.
        let mut len = 1.0f64;
        let mut count = 3usize;
        for _ in 0..3 {
            len /= 3.0;
            count *= 4;
        }
        assert_eq!(count, 192);
        assert!((d.perimeter() - count as f64 * len).abs() < 1e-12);
        assert!((d.perimeter() - 3.0 * (4.0f64 / 3.0).powi(3)).abs() < 1e-12);
    }

    #[test]
    fn koch_small_generations() {
        let d0 = gen_koch_snowflake(0, 1.0).unwrap();
        assert_eq!(d0.num_edges(), 3);
        assert!((d0.area() - 3f64.sqrt() / 4.0).abs() < 1e-14);
        let d1 = gen_koch_snowflake(1, 1.0).unwrap();
        assert_eq!(d1.num_edges(), 12);
        // Star of David: triangle plus three triangles of side 1/3.
        let expected = 3f64.sqrt() / 4.0 * (1.0 + 3.0 / 9.0);
        assert!((d1.area() - expected).abs() < 1e-14);
        assert!(gen_koch_snowflake(7, 1.0).is_err());
    }

    #[test]
    fn boundaries_are_simple() {
        for d in [
            gen_koch_snowflake(3, 1.0).unwrap(),
            gen_cantor_complement(2, 2.0, 1.0).unwrap(),
        ] {
            let edges: Vec<Segment> = d.edges().collect();
            for i in 0..edges.len() {
                for j in i + 1..edges.len() {
                    assert!(!segments_cross(edges[i], edges[j]));
                }
            }
            // Every hole lies strictly inside the outer component.
            for h in d.holes() {
                let c = h.iter().fold(Point::default(), |acc, p| acc + *p) * 0.25;
                let (lo, hi) = d.bounding_box();
                assert!(c.x > lo.x && c.x < hi.x && c.y > lo.y && c.y < hi.y);
            }
        }
    }

    #[test]
    fn reference_domains() {
        let sq = gen_reference(ReferenceKind::Square, 0).unwrap();
        assert_eq!(sq.num_edges(), 4);
        assert!((sq.area() - 1.0).abs() < 1e-15);
        let hex = gen_reference(ReferenceKind::DiskPolygon, 6).unwrap();
        assert_eq!(hex.num_edges(), 6);
        for e in hex.edges() {
            assert!((e.length() - 1.0).abs() < 1e-12);
        }
        let n = 256.0f64;
        let disk = gen_reference(ReferenceKind::DiskPolygon, 256).unwrap();
        let formula = n / 2.0 * (2.0 * PI / n).sin();
        assert!((disk.area() - formula).abs() < 1e-12);
        assert!((disk.area() - PI).abs() < 1e-3);
        assert!(gen_reference(ReferenceKind::DiskPolygon, 2).is_err());
    }

    #[test]
    fn orientation_puts_domain_on_the_left() {
        let d = gen_cantor_complement(1, 2.0, 1.0).unwrap();
        assert!(signed_area(d.outer()) > 0.0);
        for h in d.holes() {
            assert!(signed_area(h) < 0.0);
        }
        assert!(d.contains(Point::new(0.0, 0.0)));
        assert!(!d.contains(Point::new(-0.4, -0.4)));
        assert!(!d.contains(Point::new(3.0, 0.0)));
        let expected = 16.0 - 4.0 / 16.0;
        assert!((d.area() - expected).abs() < 1e-12);
    }
}
