use super::domain::Segment;
use super::point::{segment_distance, Point};

/// Uniform bucket grid over a set of segments for local queries.
#[derive(Clone, Debug)]
pub struct SegmentIndex {
    segments: Vec<Segment>,
    lo: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl SegmentIndex {
    pub fn new(segments: Vec<Segment>) -> Self {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut mean_len = 0.0;
        for s in &segments {
            for p in [s.a, s.b] {
                lo.x = lo.x.min(p.x);
                lo.y = lo.y.min(p.y);
                hi.x = hi.x.max(p.x);
                hi.y = hi.y.max(p.y);
            }
            mean_len += s.length();
        }
        let n = segments.len().max(1);
        mean_len /= n as f64;
        let extent = (hi.x - lo.x).max(hi.y - lo.y).max(1e-300);
        // About one segment per bucket, but never more than 2048 buckets a side.
        let cell = mean_len.max(extent / 2048.0).max(extent * 1e-9);
        let nx = (((hi.x - lo.x) / cell).floor() as usize + 1).max(1);
        let ny = (((hi.y - lo.y) / cell).floor() as usize + 1).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        let mut idx = Self {
            segments: Vec::new(),
            lo,
            cell,
            nx,
            ny,
            buckets: Vec::new(),
        };
        for (i, s) in segments.iter().enumerate() {
            let (i0, j0) = idx.cell_of(Point::new(s.a.x.min(s.b.x), s.a.y.min(s.b.y)));
            let (i1, j1) = idx.cell_of(Point::new(s.a.x.max(s.b.x), s.a.y.max(s.b.y)));
            for j in j0..=j1 {
                for ii in i0..=i1 {
                    buckets[j * nx + ii].push(i as u32);
                }
            }
        }
        idx.segments = segments;
        idx.buckets = buckets;
        idx
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    fn cell_of(&self, p: Point) -> (usize, usize) {
        let i = ((p.x - self.lo.x) / self.cell).floor();
        let j = ((p.y - self.lo.y) / self.cell).floor();
        (
            (i.max(0.0) as usize).min(self.nx - 1),
            (j.max(0.0) as usize).min(self.ny - 1),
        )
    }

    /// Ids of segments whose bounding boxes may meet the square of half-side
    /// `r` around `c` (a superset of the segments within distance `r`).
    pub fn candidates(&self, c: Point, r: f64) -> Vec<usize> {
        let (i0, j0) = self.cell_of(Point::new(c.x - r, c.y - r));
        let (i1, j1) = self.cell_of(Point::new(c.x + r, c.y + r));
        let mut out = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                out.extend(self.buckets[j * self.nx + i].iter().map(|&k| k as usize));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Segments within distance `r` of `c`.
    pub fn within(&self, c: Point, r: f64) -> Vec<usize> {
        self.candidates(c, r)
            .into_iter()
            .filter(|&k| {
                let s = &self.segments[k];
                segment_distance(c, s.a, s.b).0 <= r
            })
            .collect()
    }

    /// Nearest segment and its distance, searching outward ring by ring.
    pub fn nearest(&self, p: Point) -> Option<(usize, f64)> {
        if self.segments.is_empty() {
            return None;
        }
        let mut best: Option<(usize, f64)> = None;
        let mut r = self.cell;
        loop {
            for k in self.candidates(p, r) {
                let s = &self.segments[k];
                let d = segment_distance(p, s.a, s.b).0;
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((k, d));
                }
            }
            if let Some((_, d)) = best {
                if d <= r {
                    return best;
                }
            }
            let covers_all = {
                let (i0, j0) = self.cell_of(Point::new(p.x - r, p.y - r));
                let (i1, j1) = self.cell_of(Point::new(p.x + r, p.y + r));
                i0 == 0 && j0 == 0 && i1 == self.nx - 1 && j1 == self.ny - 1
            };
            if covers_all {
                return best;
            }
            r *= 2.0;
        }
    }
}

impl SegmentIndex {
    /// Whether `p` lies on the left (domain) side of the nearest boundary
    /// feature, and the distance to it.
    pub fn probe(&self, p: Point) -> Option<(bool, f64)> {
        let (_, d) = self.nearest(p)?;
        let ids = self.within(p, d * (1.0 + 1e-9) + 1e-300);
        inside_by_nearest(p, &self.segments, &ids)
    }
}

/// Signed-side test against a local set of closed boundary polylines, all
/// oriented with the domain on the left: decides whether `p` is inside from
/// the nearest boundary feature.
pub fn inside_by_nearest(p: Point, segments: &[Segment], ids: &[usize]) -> Option<(bool, f64)> {
    use super::point::orient;
    let mut best: Option<(usize, f64, f64)> = None;
    for &k in ids {
        let s = &segments[k];
        let (d, t) = segment_distance(p, s.a, s.b);
        if best.is_none_or(|(_, bd, _)| d < bd) {
            best = Some((k, d, t));
        }
    }
    let (k, d, t) = best?;
    let s = segments[k];
    if d == 0.0 {
        return Some((false, 0.0));
    }
    if t > 0.0 && t < 1.0 {
        return Some((orient(s.a, s.b, p) > 0.0, d));
    }
    // Nearest feature is a vertex: find the other edge through it.
    let v = if t <= 0.0 { s.a } else { s.b };
    let other = ids
        .iter()
        .map(|&j| segments[j])
        .find(|o| if t <= 0.0 { o.b == v } else { o.a == v });
    let Some(o) = other else {
        return Some((orient(s.a, s.b, p) > 0.0, d));
    };
    let (inc, out) = if t <= 0.0 { (o, s) } else { (s, o) };
    let left_in = orient(inc.a, inc.b, p) > 0.0;
    let left_out = orient(out.a, out.b, p) > 0.0;
    let convex = orient(inc.a, v, out.b) > 0.0;
    let inside = if convex {
        left_in && left_out
    } else {
        left_in || left_out
    };
    Some((inside, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gen_koch_snowflake, PolygonalDomain};

    fn brute_nearest(d: &PolygonalDomain, p: Point) -> f64 {
        d.distance_to_boundary(p)
    }

    #[test]
    fn nearest_matches_brute_force() {
        let d = gen_koch_snowflake(3, 1.0).unwrap();
        let idx = SegmentIndex::new(d.edges().collect());
        for i in 0..50 {
            let p = Point::new(
                -0.2 + 1.4 * ((i as f64 * 0.618_034) % 1.0),
                -0.4 + 1.4 * ((i as f64 * 0.414_214) % 1.0),
            );
            let (_, dist) = idx.nearest(p).unwrap();
            assert!((dist - brute_nearest(&d, p)).abs() < 1e-14);
        }
    }

    #[test]
    fn inside_test_agrees_with_even_odd() {
        let d = gen_koch_snowflake(2, 1.0).unwrap();
        let segs: Vec<Segment> = d.edges().collect();
        let all: Vec<usize> = (0..segs.len()).collect();
        for i in 0..400 {
            let p = Point::new(
                -0.1 + 1.2 * ((i as f64 * 0.754_877_7) % 1.0),
                -0.35 + 1.3 * ((i as f64 * 0.569_840_3) % 1.0),
            );
            let (inside, _) = inside_by_nearest(p, &segs, &all).unwrap();
            assert_eq!(inside, d.contains(p), "at {p:?}");
        }
    }
}
