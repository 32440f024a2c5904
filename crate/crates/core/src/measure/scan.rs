//! Ratio scans of `ω(E)/ω(Δ)` against `σ(E)/σ(Δ)` across scales and `a`.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::density::{sigma_of, BoundarySet};
use crate::error::{Error, Result};
use crate::fit::{linear_fit, range, LinearFit};
use crate::geometry::{far_pole, Point, PolygonalDomain};
use crate::mesh::Mesh;
use crate::solver::{assemble, CoefficientField};

/// Upper end of the window used to fit the large-scale exponent.
pub const GAMMA_WINDOW_MAX: f64 = 1e3;

/// Minimum number of groups the exponent fit needs.
pub const GAMMA_MIN_POINTS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRecord {
    pub a: f64,
    pub center_id: usize,
    pub x0: Point,
    pub r: f64,
    pub e_id: usize,
    pub sigma_ratio: f64,
    pub omega_ratio: f64,
    /// `omega_ratio / sigma_ratio`.
    pub ratio: f64,
    /// `a·σ(B(x0, r))`.
    pub a_param: f64,
    pub c_pole: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanParams {
    pub a_grid: Vec<f64>,
    pub scales: Vec<f64>,
    pub centers: Vec<Point>,
    /// Pole distance multipliers; the pole for a center lies in the annulus
    /// `[C·r_max, 2C·r_max]`.
    pub c_poles: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanMeta {
    pub domain: String,
    pub generation: u32,
    pub mesh_h: f64,
    pub a_grid: Vec<f64>,
    pub c_poles: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub records: Vec<RatioRecord>,
    /// `max |log R|` over records with `A_param ≤ 1`.
    pub summary: f64,
    pub meta: ScanMeta,
    /// Tasks that failed, as `(a, center_id, c_pole, message)`.
    pub failures: Vec<(f64, usize, f64, String)>,
}

/// The sets compared against `Δ = B(x0, r)`: `Δ` itself (id 0), the
/// concentric balls of radius `r/4` and `r/2`, and `Δ` cut by the dyadic
/// sub-boxes of its bounding square at levels 1 to 3.
pub fn e_sets(x0: Point, r: f64) -> Vec<BoundarySet> {
    let mut sets = vec![
        BoundarySet::Ball {
            center: x0,
            radius: r,
        },
        BoundarySet::Ball {
            center: x0,
            radius: 0.25 * r,
        },
        BoundarySet::Ball {
            center: x0,
            radius: 0.5 * r,
        },
    ];
    for level in 1..=3 {
        let n = 1 << level;
        let side = 2.0 * r / n as f64;
        for j in 0..n {
            for i in 0..n {
                let lo = Point::new(x0.x - r + i as f64 * side, x0.y - r + j as f64 * side);
                sets.push(BoundarySet::BallBox {
                    center: x0,
                    radius: r,
                    lo,
                    hi: lo + Point::new(side, side),
                });
            }
        }
    }
    sets
}

fn summary_of(records: &[RatioRecord]) -> f64 {
    records
        .iter()
        .filter(|r| r.a_param <= 1.0)
        .map(|r| r.ratio.ln().abs())
        .fold(0.0, f64::max)
}

pub fn ratio_scan(
    mesh: Arc<Mesh>,
    domain: &PolygonalDomain,
    coeff: &CoefficientField,
    params: &ScanParams,
) -> Result<ScanReport> {
    let r_max = params.scales.iter().copied().fold(0.0, f64::max);
    if params.a_grid.is_empty() || params.centers.is_empty() || !(r_max > 0.0) {
        return Err(Error::InvalidArgument("empty scan".into()));
    }
    let systems = params
        .a_grid
        .par_iter()
        .map(|&a| assemble(mesh.clone(), coeff, a))
        .collect::<Result<Vec<_>>>()?;
    let mut tasks = Vec::new();
    for ai in 0..params.a_grid.len() {
        for ci in 0..params.centers.len() {
            for &c in &params.c_poles {
                tasks.push((ai, ci, c));
            }
        }
    }
    let outcomes: Vec<std::result::Result<Vec<RatioRecord>, String>> = tasks
        .par_iter()
        .map(|&(ai, ci, c_pole)| {
            let sys = &systems[ai];
            let x0 = params.centers[ci];
            let pole = far_pole(domain, x0, c_pole * r_max, 2.0 * c_pole * r_max)
                .map_err(|e| e.to_string())?;
            let w = sys
                .harmonic_measure_density(pole)
                .map_err(|e| e.to_string())?;
            let mut out = Vec::new();
            for &r in &params.scales {
                let sets = e_sets(x0, r);
                let sigma_delta = sigma_of(&mesh, &sets[0]);
                let omega_delta = w.omega(&sets[0]);
                if !(sigma_delta > 0.0) {
                    continue;
                }
                for (e_id, set) in sets.iter().enumerate() {
                    let sigma_e = sigma_of(&mesh, set);
                    if sigma_e <= 1e-12 * sigma_delta {
                        continue;
                    }
                    let sigma_ratio = sigma_e / sigma_delta;
                    let omega_ratio = w.omega(set) / omega_delta;
                    out.push(RatioRecord {
                        a: sys.a,
                        center_id: ci,
                        x0,
                        r,
                        e_id,
                        sigma_ratio,
                        omega_ratio,
                        ratio: omega_ratio / sigma_ratio,
                        a_param: sys.a * sigma_delta,
                        c_pole,
                        residual: w.residual,
                    });
                }
            }
            Ok(out)
        })
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (&(ai, ci, c), out) in tasks.iter().zip(outcomes) {
        match out {
            Ok(r) => records.extend(r),
            Err(msg) => failures.push((params.a_grid[ai], ci, c, msg)),
        }
    }
    records.sort_by(|p, q| {
        (p.a, p.center_id, p.c_pole, p.r, p.e_id)
            .partial_cmp(&(q.a, q.center_id, q.c_pole, q.r, q.e_id))
            .unwrap()
    });
    Ok(ScanReport {
        summary: summary_of(&records),
        records,
        meta: ScanMeta {
            domain: domain.family().to_string(),
            generation: domain.generation(),
            mesh_h: mesh.h,
            a_grid: params.a_grid.clone(),
            c_poles: params.c_poles.clone(),
        },
        failures,
    })
}

/// One `(a, center, pole, r)` group of records.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupMax {
    pub a: f64,
    pub center_id: usize,
    pub c_pole: f64,
    pub r: f64,
    pub a_param: f64,
    pub max_ratio: f64,
    pub max_abs_log_ratio: f64,
}

pub fn group_maxima(records: &[RatioRecord]) -> Vec<GroupMax> {
    let mut groups: BTreeMap<(u64, usize, u64, u64), GroupMax> = BTreeMap::new();
    for rec in records {
        let key = (
            rec.a.to_bits(),
            rec.center_id,
            rec.c_pole.to_bits(),
            rec.r.to_bits(),
        );
        let g = groups.entry(key).or_insert(GroupMax {
            a: rec.a,
            center_id: rec.center_id,
            c_pole: rec.c_pole,
            r: rec.r,
            a_param: rec.a_param,
            max_ratio: 0.0,
            max_abs_log_ratio: 0.0,
        });
        g.max_ratio = g.max_ratio.max(rec.ratio);
        g.max_abs_log_ratio = g.max_abs_log_ratio.max(rec.ratio.ln().abs());
    }
    let mut out: Vec<GroupMax> = groups.into_values().collect();
    out.sort_by(|p, q| {
        (p.a, p.center_id, p.c_pole, p.r)
            .partial_cmp(&(q.a, q.center_id, q.c_pole, q.r))
            .unwrap()
    });
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaFit {
    pub gamma: f64,
    /// `γ̂ ± 2` standard errors.
    pub band: (f64, f64),
    pub fit: LinearFit,
    /// RMS residual over the change of the fitted line across the window.
    pub relative_residual: f64,
}

/// Slope of `log max_E R` against `log A_param` over groups with
/// `A_param ∈ (1, 10³]`.
pub fn fit_gamma(report: &ScanReport) -> Result<GammaFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = group_maxima(&report.records)
        .iter()
        .filter(|g| g.a_param > 1.0 && g.a_param <= GAMMA_WINDOW_MAX)
        .map(|g| (g.a_param.ln(), g.max_ratio.ln()))
        .unzip();
    if x.len() < GAMMA_MIN_POINTS {
        return Err(Error::InsufficientData {
            needed: GAMMA_MIN_POINTS,
            available: x.len(),
        });
    }
    let fit = linear_fit(&x, &y)?;
    Ok(GammaFit {
        gamma: fit.slope,
        band: (
            fit.slope - 2.0 * fit.slope_se,
            fit.slope + 2.0 * fit.slope_se,
        ),
        relative_residual: fit.relative_residual(range(&x)),
        fit,
    })
}

/// Slope of `max_E |log R|` against `log A_param` over groups with
/// `A_param ≤ 1`.
pub fn small_scale_trend(report: &ScanReport) -> Result<LinearFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = group_maxima(&report.records)
        .iter()
        .filter(|g| g.a_param <= 1.0)
        .map(|g| (g.a_param.ln(), g.max_abs_log_ratio))
        .unzip();
    linear_fit(&x, &y)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformityPair {
    pub a: f64,
    pub a_scaled: f64,
    pub matched_groups: usize,
    pub summary: f64,
    pub summary_scaled: f64,
    /// `|summary_scaled − summary| / summary`.
    pub relative_change: f64,
}

/// Small-scale groups of `a` paired with the closest group of `b` at the same
/// center and pole, when their `A_param` values agree within a factor `√2`.
fn matched(groups: &[GroupMax], a: f64, b: f64) -> Vec<(&GroupMax, &GroupMax)> {
    let tol = 0.5 * std::f64::consts::LN_2;
    groups
        .iter()
        .filter(|g| g.a == a)
        .filter_map(|g| {
            groups
                .iter()
                .filter(|h| h.a == b && h.center_id == g.center_id && h.c_pole == g.c_pole)
                .map(|h| ((h.a_param / g.a_param).ln().abs(), h))
                .filter(|(d, _)| *d <= tol)
                .min_by(|p, q| p.0.total_cmp(&q.0))
                .map(|(_, h)| (g, h))
        })
        .collect()
}

/// Grid pairs `(a, factor·a)` present in the scan.
fn scaled_pairs(report: &ScanReport, factor: f64) -> Vec<(f64, f64)> {
    let grid = &report.meta.a_grid;
    grid.iter()
        .filter_map(|&a| {
            grid.iter()
                .find(|&&b| (b / (a * factor) - 1.0).abs() < 1e-9)
                .map(|&b| (a, b))
        })
        .collect()
}

fn small_groups(report: &ScanReport) -> Vec<GroupMax> {
    group_maxima(&report.records)
        .into_iter()
        .filter(|g| g.a_param <= 1.0)
        .collect()
}

fn summarize(pairs: &[(&GroupMax, &GroupMax)]) -> (f64, f64) {
    pairs.iter().fold((0.0f64, 0.0f64), |(lo, hi), (g, h)| {
        (lo.max(g.max_abs_log_ratio), hi.max(h.max_abs_log_ratio))
    })
}

/// Compares the small-scale summary at `a` and `factor·a` for each such pair
/// in the grid, over matched groups only.
pub fn a_uniformity(report: &ScanReport, factor: f64) -> Vec<UniformityPair> {
    let groups = small_groups(report);
    scaled_pairs(report, factor)
        .into_iter()
        .filter_map(|(a, b)| {
            let m = matched(&groups, a, b);
            if m.is_empty() {
                return None;
            }
            let (s_lo, s_hi) = summarize(&m);
            Some(UniformityPair {
                a,
                a_scaled: b,
                matched_groups: m.len(),
                summary: s_lo,
                summary_scaled: s_hi,
                relative_change: (s_hi - s_lo).abs() / s_lo,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PooledUniformity {
    pub factor: f64,
    pub matched_groups: usize,
    /// Max over matched groups on the lower `a` side of every pair.
    pub summary: f64,
    pub summary_scaled: f64,
    pub relative_change: f64,
}

/// Like [`a_uniformity`], but with matched groups from every `(a, factor·a)`
/// pair pooled into one comparison.
pub fn pooled_uniformity(report: &ScanReport, factor: f64) -> Option<PooledUniformity> {
    let groups = small_groups(report);
    let all: Vec<_> = scaled_pairs(report, factor)
        .into_iter()
        .flat_map(|(a, b)| matched(&groups, a, b))
        .collect();
    if all.is_empty() {
        return None;
    }
    let (s_lo, s_hi) = summarize(&all);
    Some(PooledUniformity {
        factor,
        matched_groups: all.len(),
        summary: s_lo,
        summary_scaled: s_hi,
        relative_change: (s_hi - s_lo).abs() / s_lo,
    })
}

/// Largest factor by which a small-scale `R` moves between the first two pole
/// multipliers of the scan.
pub fn pole_robustness(report: &ScanReport) -> Option<f64> {
    let (c1, c2) = match report.meta.c_poles.as_slice() {
        [c1, c2, ..] => (*c1, *c2),
        _ => return None,
    };
    let key = |r: &RatioRecord| (r.a.to_bits(), r.center_id, r.r.to_bits(), r.e_id);
    let first: BTreeMap<_, &RatioRecord> = report
        .records
        .iter()
        .filter(|r| r.c_pole == c1)
        .map(|r| (key(r), r))
        .collect();
    report
        .records
        .iter()
        .filter(|r| r.c_pole == c2 && r.a_param <= 1.0)
        .filter_map(|r| {
            first
                .get(&key(r))
                .map(|p| (p.ratio / r.ratio).ln().abs().exp())
        })
        .reduce(f64::max)
}

/// Writes the scan as CSV with a fixed column order.
pub fn write_scan_csv<W: Write>(mut w: W, report: &ScanReport) -> Result<()> {
    writeln!(
        w,
        "a,x0_id,r,E_id,sigma_ratio,omega_ratio,R,A_param,residual,c_pole"
    )?;
    for r in &report.records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.a,
            r.center_id,
            r.r,
            r.e_id,
            r.sigma_ratio,
            r.omega_ratio,
            r.ratio,
            r.a_param,
            r.residual,
            r.c_pole
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(
        a: f64,
        center_id: usize,
        r: f64,
        e_id: usize,
        a_param: f64,
        ratio: f64,
    ) -> RatioRecord {
        RatioRecord {
            a,
            center_id,
            x0: Point::new(0.0, 0.0),
            r,
            e_id,
            sigma_ratio: 0.5,
            omega_ratio: 0.5 * ratio,
            ratio,
            a_param,
            c_pole: 4.0,
            residual: 1e-12,
        }
    }

    fn report(records: Vec<RatioRecord>, a_grid: Vec<f64>) -> ScanReport {
        ScanReport {
            summary: summary_of(&records),
            records,
            meta: ScanMeta {
                domain: "synthetic".into(),
                generation: 0,
                mesh_h: 1.0,
                a_grid,
                c_poles: vec![4.0],
            },
            failures: vec![],
        }
    }

    fn power_law(gamma: f64) -> ScanReport {
        let recs = (0..12)
            .map(|k| {
                let ap = 2f64.powf(0.8 * k as f64 + 0.3);
                record(1.0, 0, 0.5f64.powi(k), 1, ap, ap.powf(gamma))
            })
            .collect();
        report(recs, vec![1.0])
    }

    #[test]
    fn gamma_of_synthetic_power_laws() {
        for gamma in [0.5, 0.0] {
            let fit = fit_gamma(&power_law(gamma)).unwrap();
            assert!((fit.gamma - gamma).abs() < 1e-6);
            assert!(fit.band.0 <= fit.gamma && fit.gamma <= fit.band.1);
        }
    }

    #[test]
    fn gamma_needs_enough_groups() {
        let mut rep = power_law(0.5);
        rep.records.truncate(5);
        assert!(matches!(
            fit_gamma(&rep),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn first_set_is_the_ball() {
        let x0 = Point::new(0.3, 0.0);
        let sets = e_sets(x0, 0.1);
        assert_eq!(sets.len(), 3 + 4 + 16 + 64);
        assert_eq!(
            sets[0],
            BoundarySet::Ball {
                center: x0,
                radius: 0.1
            }
        );
    }

    #[test]
    fn uniformity_matches_on_a_param() {
        // Group maxima 0.2 at a = 1 and 0.22 at a = 100, on shifted scales.
        let mut recs = Vec::new();
        for k in 0..4 {
            let r = 0.5f64.powi(k);
            recs.push(record(1.0, 0, r, 1, 0.01 * r, 0.2f64.exp()));
            recs.push(record(100.0, 0, r * 0.01, 1, 0.01 * r * 1.1, 0.22f64.exp()));
        }
        let rep = report(recs, vec![1.0, 100.0]);
        let pairs = a_uniformity(&rep, 100.0);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].matched_groups, 4);
        assert!((pairs[0].relative_change - 0.1).abs() < 1e-12);
        let pooled = pooled_uniformity(&rep, 100.0).unwrap();
        assert!((pooled.relative_change - 0.1).abs() < 1e-12);
        assert!(pooled_uniformity(&rep, 10.0).is_none());
    }

    #[test]
    fn csv_header_and_rows() {
        let rep = power_law(0.5);
        let mut buf = Vec::new();
        write_scan_csv(&mut buf, &rep).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "a,x0_id,r,E_id,sigma_ratio,omega_ratio,R,A_param,residual,c_pole"
        );
        assert_eq!(lines.count(), rep.records.len());
    }
}
