use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn polar(radius: f64, angle: f64) -> Self {
        Self::new(radius * angle.cos(), radius * angle.sin())
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }

    pub fn midpoint(self, o: Point) -> Point {
        Point::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    pub fn scaled(self, s: f64) -> Point {
        self * s
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point {
    fn add_assign(&mut self, o: Point) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Twice the signed area of the triangle `(a, b, c)`; positive when counterclockwise.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// Distance from `p` to the closed segment `[a, b]` and the parameter of the
/// closest point.
pub fn segment_distance(p: Point, a: Point, b: Point) -> (f64, f64) {
    let d = b - a;
    let len2 = d.norm2();
    let t = if len2 > 0.0 {
        ((p - a).dot(d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p.dist(a + d * t), t)
}

/// Parameter interval `[t0, t1] ⊂ [0, 1]` of the segment `a + t (b - a)` lying
/// in the closed disk of radius `r` around `c`.
pub fn clip_segment_to_disk(a: Point, b: Point, c: Point, r: f64) -> Option<(f64, f64)> {
    let d = b - a;
    let f = a - c;
    let qa = d.norm2();
    if qa == 0.0 {
        return (f.norm2() <= r * r).then_some((0.0, 1.0));
    }
    let qb = f.dot(d);
    let qc = f.norm2() - r * r;
    let disc = qb * qb - qa * qc;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    // Numerically stable roots of qa t^2 + 2 qb t + qc = 0.
    let (mut t0, mut t1) = if qb >= 0.0 {
        let q = -(qb + s);
        (q / qa, if q != 0.0 { qc / q } else { 0.0 })
    } else {
        let q = -qb + s;
        (if q != 0.0 { qc / q } else { 0.0 }, q / qa)
    };
    if t0 > t1 {
        std::mem::swap(&mut t0, &mut t1);
    }
    let lo = t0.max(0.0);
    let hi = t1.min(1.0);
    (lo < hi).then_some((lo, hi))
}

/// Parameter interval of the segment lying in the closed axis-aligned box.
pub fn clip_segment_to_box(a: Point, b: Point, lo: Point, hi: Point) -> Option<(f64, f64)> {
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    let d = b - a;
    for (p, q, l, h) in [(a.x, d.x, lo.x, hi.x), (a.y, d.y, lo.y, hi.y)] {
        if q == 0.0 {
            if p < l || p > h {
                return None;
            }
        } else {
            let mut u0 = (l - p) / q;
            let mut u1 = (h - p) / q;
            if u0 > u1 {
                std::mem::swap(&mut u0, &mut u1);
            }
            t0 = t0.max(u0);
            t1 = t1.min(u1);
        }
    }
    (t0 < t1).then_some((t0, t1))
}
