//! Harnack ratios and oscillation decay of Green functions near the boundary.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::density::{sigma_of, BoundarySet};
use crate::error::Result;
use crate::fit::{linear_fit, LinearFit};
use crate::geometry::{far_pole, Point, PolygonalDomain};
use crate::mesh::Mesh;
use crate::solver::{assemble, CoefficientField};

/// Nodes closer to the pole than this many local mesh sizes are ignored.
pub const POLE_EXCLUSION: f64 = 4.0;

/// Longest edge of the triangle containing `p`.
pub fn local_h(mesh: &Mesh, p: Point) -> f64 {
    match mesh.locate(p) {
        Ok(loc) => {
            let q = mesh.triangle_points(loc.triangle);
            (0..3)
                .map(|i| q[i].dist(q[(i + 1) % 3]))
                .fold(0.0, f64::max)
        }
        Err(_) => mesh.h,
    }
}

fn ball_nodes<'a>(
    mesh: &'a Mesh,
    x0: Point,
    r: f64,
    pole: Option<Point>,
) -> impl Iterator<Item = usize> + 'a {
    let excl = pole.map(|p| (p, POLE_EXCLUSION * local_h(mesh, p)));
    (0..mesh.vertices.len()).filter(move |&v| {
        let p = mesh.vertices[v];
        p.dist(x0) <= r && excl.is_none_or(|(c, d)| p.dist(c) > d)
    })
}

/// `inf/sup` of `values` over mesh nodes in `Ω ∩ B(x0, r)`, away from the pole.
pub fn harnack_ratio(
    mesh: &Mesh,
    values: &[f64],
    x0: Point,
    r: f64,
    pole: Option<Point>,
) -> Option<f64> {
    let (lo, hi) = ball_nodes(mesh, x0, r, pole)
        .map(|v| values[v])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), u| {
            (lo.min(u), hi.max(u))
        });
    (hi >= lo && hi > 0.0).then(|| lo / hi)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnackRecord {
    pub a: f64,
    pub center_id: usize,
    pub r: f64,
    pub a_param: f64,
    pub ratio: f64,
    pub c_pole: f64,
    pub residual: f64,
}

/// Harnack ratios of the Green function with a far pole, for every
/// `(a, center, r)`. Centers whose pole cannot be placed are skipped.
pub fn harnack_scan(
    mesh: Arc<Mesh>,
    domain: &PolygonalDomain,
    coeff: &CoefficientField,
    a_grid: &[f64],
    centers: &[Point],
    scales: &[f64],
    c_pole: f64,
) -> Result<Vec<HarnackRecord>> {
    let r_max = scales.iter().copied().fold(0.0, f64::max);
    let poles: Vec<Option<Point>> = centers
        .iter()
        .map(|&x0| far_pole(domain, x0, c_pole * r_max, 2.0 * c_pole * r_max).ok())
        .collect();
    let tasks: Vec<(f64, usize)> = a_grid
        .iter()
        .flat_map(|&a| (0..centers.len()).map(move |c| (a, c)))
        .filter(|&(_, c)| poles[c].is_some())
        .collect();
    let out = tasks
        .par_iter()
        .map(|&(a, ci)| -> Result<Vec<HarnackRecord>> {
            let sys = assemble(mesh.clone(), coeff, a)?;
            let pole = poles[ci].unwrap();
            let g = sys.green_column(pole)?;
            let x0 = centers[ci];
            Ok(scales
                .iter()
                .filter_map(|&r| {
                    let ratio = harnack_ratio(&mesh, &g.nodal_values, x0, r, Some(pole))?;
                    let sigma = sigma_of(
                        &mesh,
                        &BoundarySet::Ball {
                            center: x0,
                            radius: r,
                        },
                    );
                    Some(HarnackRecord {
                        a,
                        center_id: ci,
                        r,
                        a_param: a * sigma,
                        ratio,
                        c_pole,
                        residual: g.residual_norm,
                    })
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(out.into_iter().flatten().collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnackPair {
    pub center_id: usize,
    pub a: f64,
    pub a_scaled: f64,
    pub a_param: f64,
    pub a_param_scaled: f64,
    pub ratio: f64,
    pub ratio_scaled: f64,
}

impl HarnackPair {
    pub fn relative_change(&self) -> f64 {
        (self.ratio_scaled - self.ratio).abs() / self.ratio
    }
}

/// Pairs records at `a` and `factor·a` (same center) whose `A_param` values
/// agree within a factor `√2`, keeping the closest match.
pub fn match_harnack(records: &[HarnackRecord], factor: f64) -> Vec<HarnackPair> {
    let tol = 0.5 * std::f64::consts::LN_2;
    let mut out = Vec::new();
    for p in records {
        let best = records
            .iter()
            .filter(|q| q.center_id == p.center_id && (q.a / (p.a * factor) - 1.0).abs() < 1e-9)
            .map(|q| ((q.a_param / p.a_param).ln().abs(), q))
            .filter(|(d, _)| *d <= tol)
            .min_by(|x, y| x.0.total_cmp(&y.0));
        if let Some((_, q)) = best {
            out.push(HarnackPair {
                center_id: p.center_id,
                a: p.a,
                a_scaled: q.a,
                a_param: p.a_param,
                a_param_scaled: q.a_param,
                ratio: p.ratio,
                ratio_scaled: q.ratio,
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OscillationDecay {
    /// `(radius, osc)` for each level that contains at least three nodes.
    pub levels: Vec<(f64, f64)>,
    /// Fitted per-halving decay ratio `η̂`.
    pub eta: f64,
    pub fit: LinearFit,
}

/// Oscillation of `values` over `B(x0, 2^{-k} r)`, `k = 0..levels`, and the
/// geometric rate fitted to it.
pub fn oscillation_decay(
    mesh: &Mesh,
    values: &[f64],
    x0: Point,
    r: f64,
    levels: usize,
    pole: Option<Point>,
) -> Result<OscillationDecay> {
    let mut pts = Vec::new();
    let mut ks = Vec::new();
    let mut logs = Vec::new();
    for k in 0..levels {
        let rk = r * 0.5f64.powi(k as i32);
        let vals: Vec<f64> = ball_nodes(mesh, x0, rk, pole).map(|v| values[v]).collect();
        if vals.len() < 3 {
            break;
        }
        let osc = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - vals.iter().copied().fold(f64::INFINITY, f64::min);
        if !(osc > 0.0) {
            break;
        }
        pts.push((rk, osc));
        ks.push(k as f64);
        logs.push(osc.ln());
    }
    let fit = linear_fit(&ks, &logs)?;
    Ok(OscillationDecay {
        levels: pts,
        eta: fit.slope.exp(),
        fit,
    })
}
