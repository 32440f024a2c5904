use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ball::BoundaryPoint;
use super::domain::{Family, PolygonalDomain};
use super::index::SegmentIndex;
use super::point::{clip_segment_to_disk, Point};
use super::sigma::BoundaryMeasure;
use crate::error::{Error, Result};
use crate::fit::linear_fit;

/// Grid resolution of the corkscrew search, as a fraction of the radius.
pub const CORKSCREW_GRID: usize = 64;

/// Empirical geometric constants. Fields that a given check does not
/// compute are left as `None`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub estimated_d: Option<f64>,
    pub lower_const: Option<f64>,
    pub upper_const: Option<f64>,
    pub doubling_const: Option<f64>,
    #[serde(rename = "corkscrew_M")]
    pub corkscrew_m: Option<f64>,
    pub samples: usize,
    pub r_min: f64,
    pub r_max: f64,
}

/// Base-2 radical inverse of `i`.
pub fn van_der_corput(mut i: u64) -> f64 {
    let mut x = 0.0;
    let mut f = 0.5;
    while i > 0 {
        if i & 1 == 1 {
            x += f;
        }
        i >>= 1;
        f *= 0.5;
    }
    x
}

/// `n` boundary points spread over the arclength of the fractal part.
pub fn sample_centers(domain: &PolygonalDomain, n: usize) -> Vec<BoundaryPoint> {
    let edges = domain.fractal_edges();
    let total: f64 = edges.clone().map(|e| domain.edge(e).length()).sum();
    (1..=n as u64)
        .map(|i| BoundaryPoint::at_arclength(domain, edges.clone(), van_der_corput(i) * total))
        .collect()
}

/// Geometric ladder `diam/10 · 2^{-k}`, truncated below at the lattice pitch
/// for prefractal families.
pub fn scale_ladder(domain: &PolygonalDomain, scales: usize) -> Vec<f64> {
    let top = domain.fractal_diameter() / 10.0;
    let floor = match domain.family() {
        Family::CantorComplement | Family::KochSnowflake => domain.lattice_pitch() * (1.0 - 1e-12),
        _ => 0.0,
    };
    (0..scales)
        .map(|k| top * 0.5f64.powi(k as i32))
        .take_while(|&r| r >= floor)
        .collect()
}

/// σ-mass of `B(c, r) ∩ ∂Ω` using a segment index over the domain edges.
pub fn indexed_ball_mass(index: &SegmentIndex, sigma: &BoundaryMeasure, c: Point, r: f64) -> f64 {
    index
        .candidates(c, r)
        .into_iter()
        .map(|k| {
            let s = index.segments()[k];
            clip_segment_to_disk(s.a, s.b, c, r)
                .map_or(0.0, |(t0, t1)| (t1 - t0) * s.length() * sigma.density(k))
        })
        .sum()
}

pub fn check_ahlfors(
    domain: &PolygonalDomain,
    sigma: &BoundaryMeasure,
    n_centers: usize,
    scales_per_center: usize,
) -> Result<RegularityReport> {
    let ladder = scale_ladder(domain, scales_per_center);
    if ladder.len() < 2 || n_centers == 0 {
        return Err(Error::InsufficientData {
            needed: 2,
            available: ladder.len().min(n_centers),
        });
    }
    let index = SegmentIndex::new(domain.edges().collect());
    let centers = sample_centers(domain, n_centers);
    let d = sigma.dimension_d;
    // (log r, log σ, σ/r^d, doubling ratio)
    let rows: Vec<(f64, f64, f64, f64)> = centers
        .par_iter()
        .flat_map_iter(|q| {
            let c = q.position(domain);
            let index = &index;
            ladder.iter().map(move |&r| {
                let m = indexed_ball_mass(index, sigma, c, r);
                let m2 = indexed_ball_mass(index, sigma, c, 2.0 * r);
                (r.ln(), m.ln(), m / r.powf(d), m2 / m)
            })
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let fit = linear_fit(&xs, &ys)?;
    let fold = |f: fn(f64, f64) -> f64, init: f64, sel: fn(&(f64, f64, f64, f64)) -> f64| {
        rows.iter().map(sel).fold(init, f)
    };
    Ok(RegularityReport {
        estimated_d: Some(fit.slope),
        lower_const: Some(fold(f64::min, f64::INFINITY, |r| r.2)),
        upper_const: Some(fold(f64::max, 0.0, |r| r.2)),
        doubling_const: Some(fold(f64::max, 1.0, |r| r.3)),
        corkscrew_m: None,
        samples: rows.len(),
        r_min: *ladder.last().unwrap(),
        r_max: ladder[0],
    })
}

/// Grid search over `B(c, r) ∩ Ω` at spacing `r/64` for the point farthest
/// from the boundary.
fn corkscrew_search(index: &SegmentIndex, c: Point, r: f64) -> Option<(Point, f64)> {
    let n = CORKSCREW_GRID as i64;
    let step = r / n as f64;
    let mut best: Option<(Point, f64)> = None;
    for j in -n..=n {
        for i in -n..=n {
            if i * i + j * j > n * n {
                continue;
            }
            let p = Point::new(c.x + i as f64 * step, c.y + j as f64 * step);
            if let Some((true, d)) = index.probe(p) {
                if best.is_none_or(|(_, bd)| d > bd) {
                    best = Some((p, d));
                }
            }
        }
    }
    best
}

pub fn check_corkscrew(
    domain: &PolygonalDomain,
    n_centers: usize,
    scales_per_center: usize,
) -> Result<RegularityReport> {
    let ladder = scale_ladder(domain, scales_per_center);
    if ladder.is_empty() || n_centers == 0 {
        return Err(Error::InsufficientData {
            needed: 1,
            available: 0,
        });
    }
    let index = SegmentIndex::new(domain.edges().collect());
    let centers = sample_centers(domain, n_centers);
    let ms: Vec<f64> = centers
        .par_iter()
        .flat_map_iter(|q| {
            let c = q.position(domain);
            let index = &index;
            ladder
                .iter()
                .map(move |&r| match corkscrew_search(index, c, r) {
                    Some((_, d)) => r / d,
                    None => f64::INFINITY,
                })
        })
        .collect();
    Ok(RegularityReport {
        corkscrew_m: Some(ms.iter().copied().fold(1.0, f64::max)),
        samples: ms.len(),
        r_min: *ladder.last().unwrap(),
        r_max: ladder[0],
        ..Default::default()
    })
}

pub fn corkscrew_point(domain: &PolygonalDomain, x0: Point, r: f64) -> Result<Point> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius {r}")));
    }
    let index = SegmentIndex::new(domain.edges().collect());
    corkscrew_search(&index, x0, r)
        .map(|(p, _)| p)
        .ok_or_else(|| Error::InvalidArgument(format!("no interior point within {r} of {x0:?}")))
}

/// Interior point in the annulus `r_in ≤ |X − x0| ≤ r_out` farthest from the
/// boundary, found by grid search at spacing `r_out/64`.
pub fn far_pole(domain: &PolygonalDomain, x0: Point, r_in: f64, r_out: f64) -> Result<Point> {
    let index = SegmentIndex::new(domain.edges().collect());
    let n = CORKSCREW_GRID as i64;
    let step = r_out / n as f64;
    let mut best: Option<(Point, f64)> = None;
    for j in -n..=n {
        for i in -n..=n {
            let p = Point::new(x0.x + i as f64 * step, x0.y + j as f64 * step);
            let rho = p.dist(x0);
            if rho < r_in || rho > r_out {
                continue;
            }
            if let Some((true, d)) = index.probe(p) {
                if best.is_none_or(|(_, bd)| d > bd) {
                    best = Some((p, d));
                }
            }
        }
    }
    best.map(|(p, _)| p).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "no interior point at distance [{r_in}, {r_out}] from {x0:?}"
        ))
    })
}
