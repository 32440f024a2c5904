//! Balanced quadtree triangulation for domains bounded by axis-aligned
//! lattice polylines (Cantor complements and the unit square).
//!
//! Leaves without hanging midpoints are cut along their "/" diagonal; leaves
//! with hanging midpoints get a center vertex and a fan. Every triangle is a
//! right isosceles triangle.

use std::collections::{HashMap, HashSet};

use super::{check_budget, Mesh};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryMeasure, Family, Point, PolygonalDomain, SegmentIndex};

/// Grading factor: a cell of side `s` must stay `GRADING·s` away from holes.
const GRADING: f64 = 1.0;

/// A disk removed from the domain, approximated by the lattice cells whose
/// centers lie inside it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Obstacle {
    pub center: Point,
    pub radius: f64,
}

#[derive(Clone, Copy)]
struct IBox {
    lo: (i64, i64),
    hi: (i64, i64),
}

impl IBox {
    fn dist(&self, o: &IBox) -> f64 {
        let dx = (self.lo.0 - o.hi.0).max(o.lo.0 - self.hi.0).max(0);
        let dy = (self.lo.1 - o.hi.1).max(o.lo.1 - self.hi.1).max(0);
        (dx as f64).hypot(dy as f64)
    }
}

/// Axis-aligned lattice segment.
#[derive(Clone, Copy)]
struct ISeg {
    a: (i64, i64),
    b: (i64, i64),
}

impl ISeg {
    fn meets_closed(&self, c: &IBox) -> bool {
        let (x0, x1) = (self.a.0.min(self.b.0), self.a.0.max(self.b.0));
        let (y0, y1) = (self.a.1.min(self.b.1), self.a.1.max(self.b.1));
        x0 <= c.hi.0 && x1 >= c.lo.0 && y0 <= c.hi.1 && y1 >= c.lo.1
    }

    fn crosses_open(&self, c: &IBox) -> bool {
        let (x0, x1) = (self.a.0.min(self.b.0), self.a.0.max(self.b.0));
        let (y0, y1) = (self.a.1.min(self.b.1), self.a.1.max(self.b.1));
        if y0 == y1 {
            c.lo.1 < y0 && y0 < c.hi.1 && x0.max(c.lo.0) < x1.min(c.hi.0)
        } else {
            c.lo.0 < x0 && x0 < c.hi.0 && y0.max(c.lo.1) < y1.min(c.hi.1)
        }
    }
}

struct Builder {
    segs: Vec<ISeg>,
    holes: Vec<IBox>,
    index: SegmentIndex,
    origin: Point,
    step: f64,
    cap: i64,
    uniform: bool,
    obstacle: Option<(Point, f64)>,
    /// Grading targets in lattice units.
    foci: Vec<(f64, f64)>,
    leaves: Vec<(i64, i64, i64)>,
}

impl Builder {
    fn point(&self, x: i64, y: i64) -> Point {
        Point::new(
            self.origin.x + x as f64 * self.step,
            self.origin.y + y as f64 * self.step,
        )
    }

    fn in_obstacle(&self, i: i64, j: i64) -> bool {
        self.obstacle.is_some_and(|(c, r)| {
            let p = Point::new(
                self.origin.x + (i as f64 + 0.5) * self.step,
                self.origin.y + (j as f64 + 0.5) * self.step,
            );
            p.dist(c) <= r
        })
    }

    fn recurse(&mut self, i: i64, j: i64, s: i64, segs: &[usize], holes: &[usize]) -> Result<()> {
        let cell = IBox {
            lo: (i, j),
            hi: (i + s, j + s),
        };
        let local: Vec<usize> = segs
            .iter()
            .copied()
            .filter(|&k| self.segs[k].meets_closed(&cell))
            .collect();
        let straddles = local.iter().any(|&k| self.segs[k].crosses_open(&cell));
        if !straddles {
            let half = 0.5 * s as f64;
            let c = Point::new(
                self.origin.x + (i as f64 + half) * self.step,
                self.origin.y + (j as f64 + half) * self.step,
            );
            let inside = matches!(self.index.probe(c), Some((true, _)));
            if !inside {
                return Ok(());
            }
        }
        let near: Vec<usize> = holes
            .iter()
            .copied()
            .filter(|&h| self.holes[h].dist(&cell) < GRADING * s as f64)
            .collect();
        let near_focus = self.foci.iter().any(|&(x, y)| {
            let dx = (i as f64 - x).max(x - (i + s) as f64).max(0.0);
            let dy = (j as f64 - y).max(y - (j + s) as f64).max(0.0);
            dx.hypot(dy) < GRADING * s as f64
        });
        let split =
            s > 1 && (straddles || self.uniform || s > self.cap || near_focus || !near.is_empty());
        if split {
            let c = s / 2;
            for (di, dj) in [(0, 0), (c, 0), (0, c), (c, c)] {
                self.recurse(i + di, j + dj, c, &local, &near)?;
            }
            return Ok(());
        }
        if s == 1 && self.in_obstacle(i, j) {
            return Ok(());
        }
        self.leaves.push((i, j, s));
        check_budget(self.leaves.len())
    }
}

fn find_leaf(
    leaves: &HashSet<(i64, i64, i64)>,
    x: i64,
    y: i64,
    root: i64,
) -> Option<(i64, i64, i64)> {
    if x < 0 || y < 0 {
        return None;
    }
    let mut s = 1;
    while s <= root {
        let key = (x & !(s - 1), y & !(s - 1), s);
        if leaves.contains(&key) {
            return Some(key);
        }
        s *= 2;
    }
    None
}

fn balance(leaves: Vec<(i64, i64, i64)>, root: i64) -> Result<Vec<(i64, i64, i64)>> {
    let mut set: HashSet<(i64, i64, i64)> = leaves.iter().copied().collect();
    let mut work = leaves;
    while let Some(leaf) = work.pop() {
        if !set.contains(&leaf) {
            continue;
        }
        let (i, j, s) = leaf;
        for (x, y) in [(i + s, j), (i - 1, j), (i, j + s), (i, j - 1)] {
            if let Some(nb) = find_leaf(&set, x, y, root) {
                if nb.2 > 2 * s {
                    set.remove(&nb);
                    let (ni, nj, ns) = nb;
                    let c = ns / 2;
                    for (di, dj) in [(0, 0), (c, 0), (0, c), (c, c)] {
                        set.insert((ni + di, nj + dj, c));
                        work.push((ni + di, nj + dj, c));
                    }
                    work.push(leaf);
                    check_budget(set.len())?;
                    break;
                }
            }
        }
    }
    let mut out: Vec<_> = set.into_iter().collect();
    out.sort_unstable_by_key(|&(i, j, s)| (j, i, s));
    Ok(out)
}

pub(super) fn build(
    domain: &PolygonalDomain,
    sigma: &BoundaryMeasure,
    target_h: f64,
    obstacle: Option<&Obstacle>,
    foci: &[Point],
) -> Result<Mesh> {
    let pitch = domain.lattice_pitch();
    let (lo, hi) = domain.bounding_box();
    let mut m = ((pitch / target_h) * (1.0 - 1e-12)).ceil().max(1.0) as i64;
    m = (m as u64).next_power_of_two() as i64;
    let aligned = |step: f64| {
        domain.components().iter().flatten().all(|p| {
            let u = (p.x - lo.x) / step;
            let v = (p.y - lo.y) / step;
            (u - u.round()).abs() < 1e-7 && (v - v.round()).abs() < 1e-7
        })
    };
    while !aligned(pitch / m as f64) {
        m *= 2;
        if m > 1 << 20 {
            return Err(Error::InvalidArgument(
                "domain vertices do not sit on a square lattice".into(),
            ));
        }
    }
    let step = pitch / m as f64;
    let n = (((hi.x - lo.x).max(hi.y - lo.y)) / step).round() as i64;
    let uniform = domain.family() == Family::Square && foci.is_empty();
    if uniform {
        check_budget(((n + 1) * (n + 1)) as usize)?;
    }
    let root = (n as u64).next_power_of_two() as i64;
    let to_lattice = |p: Point| {
        (
            ((p.x - lo.x) / step).round() as i64,
            ((p.y - lo.y) / step).round() as i64,
        )
    };
    let mut segs = Vec::with_capacity(domain.num_edges());
    for e in domain.edges() {
        let (a, b) = (to_lattice(e.a), to_lattice(e.b));
        if a.0 != b.0 && a.1 != b.1 {
            return Err(Error::InvalidArgument(
                "quadtree meshing needs axis-aligned edges".into(),
            ));
        }
        segs.push(ISeg { a, b });
    }
    let mut holes: Vec<IBox> = domain
        .holes()
        .iter()
        .map(|h| {
            let pts: Vec<(i64, i64)> = h.iter().map(|&p| to_lattice(p)).collect();
            IBox {
                lo: (
                    pts.iter().map(|p| p.0).min().unwrap(),
                    pts.iter().map(|p| p.1).min().unwrap(),
                ),
                hi: (
                    pts.iter().map(|p| p.0).max().unwrap(),
                    pts.iter().map(|p| p.1).max().unwrap(),
                ),
            }
        })
        .collect();
    if let Some(ob) = obstacle {
        if !(ob.radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "obstacle radius {}",
                ob.radius
            )));
        }
        if domain.distance_to_boundary(ob.center) <= ob.radius + 2.0 * step
            || !domain.contains(ob.center)
        {
            return Err(Error::InvalidArgument(
                "obstacle is too close to the boundary".into(),
            ));
        }
        let a = to_lattice(ob.center - Point::new(ob.radius, ob.radius));
        let b = to_lattice(ob.center + Point::new(ob.radius, ob.radius));
        holes.push(IBox {
            lo: (a.0 - 1, a.1 - 1),
            hi: (b.0 + 1, b.1 + 1),
        });
    }
    // Graded squares keep cells at most 1/16 of the side.
    let cap = match domain.family() {
        Family::CantorComplement => ((0.25 * domain.base_scale() / step).round() as i64).max(1),
        _ if !foci.is_empty() => (root / 16).max(1),
        _ => root,
    };
    let mut b = Builder {
        segs,
        holes,
        index: SegmentIndex::new(domain.edges().collect()),
        origin: lo,
        step,
        cap,
        uniform,
        obstacle: obstacle.map(|o| (o.center, o.radius)),
        foci: foci
            .iter()
            .map(|p| ((p.x - lo.x) / step, (p.y - lo.y) / step))
            .collect(),
        leaves: Vec::new(),
    };
    let all_segs: Vec<usize> = (0..b.segs.len()).collect();
    let all_holes: Vec<usize> = (0..b.holes.len()).collect();
    b.recurse(0, 0, root, &all_segs, &all_holes)?;
    let leaves = balance(std::mem::take(&mut b.leaves), root)?;

    let mut corner_set: HashSet<(i64, i64)> = HashSet::new();
    for &(i, j, s) in &leaves {
        for c in [(i, j), (i + s, j), (i + s, j + s), (i, j + s)] {
            corner_set.insert(c);
        }
    }
    check_budget(corner_set.len() + leaves.len())?;
    let mut ids: HashMap<(i64, i64), usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut vid = |x: i64, y: i64, vertices: &mut Vec<Point>| -> usize {
        *ids.entry((x, y)).or_insert_with(|| {
            vertices.push(b.point(x, y));
            vertices.len() - 1
        })
    };
    let mut triangles = Vec::with_capacity(2 * leaves.len());
    for &(i, j, s) in &leaves {
        let corners = [(i, j), (i + s, j), (i + s, j + s), (i, j + s)];
        let mids: Vec<Option<(i64, i64)>> = (0..4)
            .map(|k| {
                if s < 2 {
                    return None;
                }
                let (a, c) = (corners[k], corners[(k + 1) % 4]);
                let mp = ((a.0 + c.0) / 2, (a.1 + c.1) / 2);
                corner_set.contains(&mp).then_some(mp)
            })
            .collect();
        let c: Vec<usize> = corners
            .iter()
            .map(|&(x, y)| vid(x, y, &mut vertices))
            .collect();
        if mids.iter().all(Option::is_none) {
            triangles.push([c[0], c[1], c[2]]);
            triangles.push([c[0], c[2], c[3]]);
            continue;
        }
        let center = vid(i + s / 2, j + s / 2, &mut vertices);
        for k in 0..4 {
            let (a, n) = (c[k], c[(k + 1) % 4]);
            match mids[k] {
                Some((x, y)) => {
                    let mv = vid(x, y, &mut vertices);
                    triangles.push([a, mv, center]);
                    triangles.push([mv, n, center]);
                }
                None => triangles.push([a, n, center]),
            }
        }
    }
    let holes = domain.num_holes() + usize::from(obstacle.is_some());
    Mesh::from_triangles(vertices, triangles, Some((domain, sigma)), holes)
}
