//! Executes an [`ExperimentConfig`] into a report directory.
//!
//! Everything is written to a hidden staging directory next to the output
//! and renamed into place at the end, so an interrupted run never leaves a
//! directory that looks finished.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use robin_lab::geometry::{
    attach_sigma, check_ahlfors, check_corkscrew, far_pole, nominal_dimension, sample_centers,
    BoundaryMeasure,
};
use robin_lab::measure::{
    active_boundary, density_bound_scan, dirichlet_compare, fit_gamma, match_harnack,
    pole_robustness, pooled_uniformity, ratio_scan, small_scale_trend, write_scan_csv, BoundarySet,
    HarnackRecord, ScanParams,
};
use robin_lab::mesh::{
    load_or_build, refine, refine_onto_circle, triangulate_graded, triangulate_with_obstacle, Mesh,
    Obstacle,
};
use robin_lab::solver::{assemble, l2_error, CoefficientField};
use robin_lab::walker::{absorption_histogram, build_chain, estimate_omega_mc};
use robin_lab::{Point, PolygonalDomain};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::config::{Experiment, ExperimentConfig};
use crate::plots::render_dir;
use crate::row;
use crate::table::Table;

/// Environment variable naming the mesh cache directory.
pub const CACHE_ENV: &str = "RML_CACHE_DIR";
pub const REPORT_FILE: &str = "report.json";

// Thresholds behind the pass/fail flags.
const SLOPE_BAND: f64 = 0.05;
const UNIFORMITY_FACTOR: f64 = 100.0;
const MAX_UNIFORMITY_CHANGE: f64 = 0.25;
const MAX_GAMMA_RESIDUAL: f64 = 0.25;
const MAX_POLE_FACTOR: f64 = 3.0;
const HARNACK_A_MAX: f64 = 1e-2;
const HARNACK_MIN_RATIO: f64 = 0.01;
const HARNACK_MAX_CHANGE: f64 = 0.30;
const DENSITY_WINDOW: (f64, f64) = (1e-2, 1.0);
const DENSITY_MAX_RESIDUAL: f64 = 0.10;
const ORACLE_RATIO: (f64, f64) = (3.5, 4.5);
const MC_Z: f64 = 4.0;
const MC_MIN_WITHIN: f64 = 0.95;
const DIMENSION_TOL: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: Option<f64>,
    pub limit: String,
}

fn check(name: &str, pass: bool, value: f64, limit: &str) -> Check {
    Check {
        name: name.into(),
        pass,
        value: value.is_finite().then_some(value),
        limit: limit.into(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub reported_solves: usize,
    pub max_residual: f64,
}

impl SolverStats {
    fn record(&mut self, residual: f64) {
        self.reported_solves += 1;
        self.max_residual = self.max_residual.max(residual);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshStats {
    pub vertices: usize,
    pub triangles: usize,
    pub h: f64,
    pub max_angle_deg: f64,
}

impl MeshStats {
    fn of(m: &Mesh) -> Self {
        Self {
            vertices: m.num_vertices(),
            triangles: m.num_triangles(),
            h: m.h,
            max_angle_deg: m.max_angle_deg(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Complete,
    Failed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub status: Status,
    pub error: Option<String>,
    /// CSV and SVG files in the report directory.
    pub files: Vec<String>,
    pub wall_clock_secs: f64,
    pub mesh: Option<MeshStats>,
    pub solver: SolverStats,
    pub summary: Value,
    pub checks: Vec<Check>,
}

impl ExperimentReport {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(REPORT_FILE);
        let text =
            fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn all_checks_pass(&self) -> bool {
        self.status == Status::Complete && self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Default)]
struct Outcome {
    mesh: Option<MeshStats>,
    stats: SolverStats,
    summary: Map<String, Value>,
    checks: Vec<Check>,
}

struct Setup<'a> {
    cfg: &'a ExperimentConfig,
    dir: &'a Path,
    domain: PolygonalDomain,
    sigma: BoundaryMeasure,
    coeff: CoefficientField,
    h: f64,
    centers: Vec<Point>,
    scales: Vec<f64>,
}

impl Setup<'_> {
    /// Cached base mesh followed by `mesh.refinements` uniform refinements.
    fn uniform_levels(&self) -> Result<Vec<Mesh>> {
        let cache = std::env::var_os(CACHE_ENV).map(PathBuf::from);
        let mut levels = vec![load_or_build(
            cache.as_deref(),
            &self.domain,
            &self.sigma,
            self.h,
        )?];
        for _ in 0..self.cfg.mesh.refinements {
            let last = levels.last().unwrap();
            let next = if last.circle_radius.is_some() {
                refine_onto_circle(last)?
            } else {
                refine(last)?
            };
            levels.push(next);
        }
        Ok(levels)
    }

    fn mesh(&self, foci: &[Point]) -> Result<Arc<Mesh>> {
        let m = if self.cfg.mesh.graded {
            triangulate_graded(&self.domain, &self.sigma, self.h, foci)?
        } else {
            self.uniform_levels()?.pop().unwrap()
        };
        Ok(Arc::new(m))
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }
}

fn staging_dir(out: &Path) -> Result<PathBuf> {
    let parent = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = out
        .file_name()
        .with_context(|| format!("output path {} has no final component", out.display()))?;
    fs::create_dir_all(&parent)?;
    let tmp = parent.join(format!(
        ".{}.partial-{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    if tmp.exists() {
        fs::remove_dir_all(&tmp)?;
    }
    fs::create_dir(&tmp)?;
    Ok(tmp)
}

fn publish(tmp: &Path, out: &Path) -> Result<()> {
    if out.exists() {
        if !out.join(REPORT_FILE).exists() && fs::read_dir(out)?.next().is_some() {
            bail!("{} exists and is not a report directory", out.display());
        }
        fs::remove_dir_all(out)?;
    }
    fs::rename(tmp, out)?;
    Ok(())
}

/// Runs the experiment and publishes its report directory. Errors inside the
/// experiment are recorded in a failed report; only configuration and I/O
/// problems come back as `Err`.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let start = Instant::now();
    let tmp = staging_dir(&cfg.output)?;
    let result = execute(cfg, &tmp);
    let (status, error, outcome) = match result {
        Ok(o) => (Status::Complete, None, o),
        Err(e) => {
            fs::remove_dir_all(&tmp)?;
            fs::create_dir(&tmp)?;
            (Status::Failed, Some(format!("{e:#}")), Outcome::default())
        }
    };
    let mut files = render_dir(&tmp)?;
    for entry in fs::read_dir(&tmp)? {
        let name = entry?.file_name().to_string_lossy().into_owned();
        if name.ends_with(".csv") {
            files.push(name);
        }
    }
    files.sort();
    let report = ExperimentReport {
        config: cfg.clone(),
        config_hash: cfg.hash(),
        status,
        error,
        files,
        wall_clock_secs: start.elapsed().as_secs_f64(),
        mesh: outcome.mesh,
        solver: outcome.stats,
        summary: Value::Object(outcome.summary),
        checks: outcome.checks,
    };
    fs::write(
        tmp.join(REPORT_FILE),
        serde_json::to_string_pretty(&report)?,
    )?;
    publish(&tmp, &cfg.output)?;
    Ok(report)
}

fn execute(cfg: &ExperimentConfig, dir: &Path) -> Result<Outcome> {
    let domain = cfg.domain.build()?;
    let sigma = attach_sigma(&domain, cfg.sigma_rule())?;
    let coeff = CoefficientField::from_kind(cfg.coefficient.clone())?;
    let centers = cfg.centers.clone().unwrap_or_else(|| {
        sample_centers(&domain, cfg.center_count)
            .iter()
            .map(|b| b.position(&domain))
            .collect()
    });
    let s = Setup {
        cfg,
        dir,
        h: cfg.target_h(&domain),
        scales: cfg.scale_list(&domain),
        domain,
        sigma,
        coeff,
        centers,
    };
    match cfg.experiment {
        Experiment::Oracle => oracle(&s),
        Experiment::RatioScan => scan(&s),
        Experiment::HarnackScan => harnack(&s),
        Experiment::DensityScan => density(&s),
        Experiment::ActiveBoundary => active(&s),
        Experiment::DirichletCompare => compare(&s),
        Experiment::MonteCarloCheck => monte_carlo(&s),
        Experiment::Regularity => regularity(&s),
    }
}

fn to_value<T: Serialize>(v: T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// Data `x/|x|` on the disk of radius `R`; the solution is `c·x` with
/// `c = a/(aR + 1)`.
fn oracle(s: &Setup) -> Result<Outcome> {
    let mut o = Outcome::default();
    let radius = s.domain.disk_radius().context("oracle needs a disk")?;
    let levels: Vec<Arc<Mesh>> = s.uniform_levels()?.into_iter().map(Arc::new).collect();
    o.mesh = levels.last().map(|m| MeshStats::of(m));
    let mut t = Table::new(&[
        "a",
        "level",
        "h",
        "vertices",
        "l2_error",
        "ratio",
        "iterations",
        "residual",
    ]);
    let mut rows = Vec::new();
    for &a in &s.cfg.a_grid {
        let c = a / (a * radius + 1.0);
        let mut prev: Option<f64> = None;
        for (level, m) in levels.iter().enumerate() {
            let f: Vec<f64> = m
                .vertices
                .iter()
                .map(|p| p.x / p.norm().max(1e-300))
                .collect();
            let u = assemble(m.clone(), &s.coeff, a)?.solve_robin(&f)?;
            o.stats.record(u.residual_norm);
            let err = l2_error(m, &u.nodal_values, |p| c * p.x);
            let ratio = prev.map_or(f64::NAN, |p| p / err);
            if prev.is_some() {
                o.checks.push(check(
                    &format!("oracle_ratio_a{a}_level{level}"),
                    ratio >= ORACLE_RATIO.0 && ratio <= ORACLE_RATIO.1,
                    ratio,
                    &format!("[{}, {}]", ORACLE_RATIO.0, ORACLE_RATIO.1),
                ));
            }
            prev = Some(err);
            t.push(row![
                a,
                level,
                m.h,
                m.num_vertices(),
                err,
                ratio,
                u.iterations,
                u.residual_norm
            ]);
            rows.push(json!({"a": a, "level": level, "h": m.h, "l2_error": err}));
        }
    }
    t.write(&s.path("oracle.csv"))?;
    o.summary.insert("levels".into(), Value::Array(rows));
    Ok(o)
}

fn scan(s: &Setup) -> Result<Outcome> {
    let mut o = Outcome::default();
    let mesh = s.mesh(&s.centers)?;
    o.mesh = Some(MeshStats::of(&mesh));
    let params = ScanParams {
        a_grid: s.cfg.a_grid.clone(),
        scales: s.scales.clone(),
        centers: s.centers.clone(),
        c_poles: s.cfg.c_pole.clone(),
    };
    let rep = ratio_scan(mesh, &s.domain, &s.coeff, &params)?;
    write_scan_csv(fs::File::create(s.path("scan.csv"))?, &rep)?;
    for r in &rep.records {
        o.stats.record(r.residual);
    }
    o.summary.insert("records".into(), json!(rep.records.len()));
    o.summary
        .insert("skipped".into(), json!(rep.failures.len()));
    o.summary
        .insert("max_small_scale_r".into(), json!(rep.summary));
    let pole_factor = pole_robustness(&rep);
    if let Some(f) = pole_factor {
        o.checks.push(check(
            "pole_robustness",
            f <= MAX_POLE_FACTOR,
            f,
            "<= 3 between first two C",
        ));
    }
    o.summary.insert("pole_factor".into(), json!(pole_factor));
    match small_scale_trend(&rep) {
        Ok(fit) => {
            o.checks.push(check(
                "small_scale_slope",
                fit.slope.abs() <= SLOPE_BAND,
                fit.slope,
                "|slope| <= 0.05",
            ));
            o.summary.insert("small_scale_trend".into(), to_value(fit));
        }
        Err(e) => {
            o.checks.push(check(
                "small_scale_slope",
                false,
                f64::NAN,
                "|slope| <= 0.05",
            ));
            o.summary
                .insert("small_scale_trend".into(), json!(e.to_string()));
        }
    }
    let pooled = pooled_uniformity(&rep, UNIFORMITY_FACTOR);
    let change = pooled.as_ref().map_or(f64::NAN, |p| p.relative_change);
    o.checks.push(check(
        "pooled_a_uniformity",
        change < MAX_UNIFORMITY_CHANGE,
        change,
        "< 0.25 at factor 100",
    ));
    o.summary
        .insert("pooled_uniformity".into(), to_value(pooled));
    match fit_gamma(&rep) {
        Ok(g) => {
            o.checks.push(check(
                "gamma_fit_residual",
                g.gamma.is_finite() && g.relative_residual <= MAX_GAMMA_RESIDUAL,
                g.relative_residual,
                "<= 0.25",
            ));
            o.summary.insert("gamma".into(), to_value(g));
        }
        Err(e) => {
            o.checks
                .push(check("gamma_fit_residual", false, f64::NAN, "<= 0.25"));
            o.summary.insert("gamma".into(), json!(e.to_string()));
        }
    }
    Ok(o)
}

fn harnack(s: &Setup) -> Result<Outcome> {
    let mut o = Outcome::default();
    let r_max = s.scales.iter().copied().fold(0.0, f64::max);
    let mut foci = s.centers.clone();
    for &c in &s.cfg.c_pole {
        for &x0 in &s.centers {
            if let Ok(p) = far_pole(&s.domain, x0, c * r_max, 2.0 * c * r_max) {
                foci.push(p);
            }
        }
    }
    let mesh = s.mesh(&foci)?;
    o.mesh = Some(MeshStats::of(&mesh));
    let mut records: Vec<HarnackRecord> = Vec::new();
    for &c in &s.cfg.c_pole {
        records.extend(robin_lab::measure::harnack_scan(
            mesh.clone(),
            &s.domain,
            &s.coeff,
            &s.cfg.a_grid,
            &s.centers,
            &s.scales,
            c,
        )?);
    }
    let mut t = Table::new(&[
        "a",
        "center_id",
        "r",
        "A_param",
        "ratio",
        "c_pole",
        "residual",
    ]);
    for r in &records {
        o.stats.record(r.residual);
        t.push(row![
            r.a,
            r.center_id,
            r.r,
            r.a_param,
            r.ratio,
            r.c_pole,
            r.residual
        ]);
    }
    t.write(&s.path("harnack.csv"))?;
    let min_ratio = records
        .iter()
        .filter(|r| r.a_param <= HARNACK_A_MAX)
        .map(|r| r.ratio)
        .fold(f64::INFINITY, f64::min);
    let pairs: Vec<_> = match_harnack(&records, UNIFORMITY_FACTOR)
        .into_iter()
        .filter(|p| p.a_param <= HARNACK_A_MAX && p.a_param_scaled <= HARNACK_A_MAX)
        .collect();
    let change = pairs
        .iter()
        .map(|p| p.relative_change())
        .fold(f64::NAN, f64::max);
    o.checks.push(check(
        "harnack_min_ratio",
        min_ratio >= HARNACK_MIN_RATIO,
        min_ratio,
        ">= 0.01 for A <= 1e-2",
    ));
    o.checks.push(check(
        "harnack_a_change",
        change <= HARNACK_MAX_CHANGE,
        change,
        "<= 0.30 at factor 100",
    ));
    o.summary.insert("records".into(), json!(records.len()));
    o.summary.insert("matched_pairs".into(), json!(pairs.len()));
    Ok(o)
}

fn density(s: &Setup) -> Result<Outcome> {
    let mut o = Outcome::default();
    let x0 = s.centers[0];
    let r = s.cfg.radius.context("density_scan needs radius")?;
    let mesh = s.mesh(&[x0])?;
    o.mesh = Some(MeshStats::of(&mesh));
    let scan = density_bound_scan(mesh, &s.coeff, &s.cfg.a_grid, x0, r, s.cfg.support_factor)?;
    let mut t = Table::new(&["a", "a_sigma", "inv_a_sigma", "min_u", "residual"]);
    for row in &scan.rows {
        o.stats.record(row.residual);
        t.push(row![
            row.a,
            row.a_sigma,
            1.0 / row.a_sigma,
            row.min_u,
            row.residual
        ]);
    }
    t.write(&s.path("density.csv"))?;
    o.summary.insert("center".into(), to_value(x0));
    o.summary
        .insert("sigma_ball".into(), json!(scan.sigma_ball));
    match scan.fit(DENSITY_WINDOW.0, DENSITY_WINDOW.1) {
        Ok(fit) => {
            o.checks.push(check(
                "density_fit",
                fit.fit.slope < 0.0 && fit.relative_residual <= DENSITY_MAX_RESIDUAL,
                fit.relative_residual,
                "negative slope, relative residual <= 0.10",
            ));
            o.summary.insert("fit".into(), to_value(fit));
        }
        Err(e) => {
            o.checks.push(check(
                "density_fit",
                false,
                f64::NAN,
                "negative slope, relative residual <= 0.10",
            ));
            o.summary.insert("fit".into(), json!(e.to_string()));
        }
    }
    Ok(o)
}

fn active(s: &Setup) -> Result<Outcome> {
    let mut o = Outcome::default();
    let ob = Obstacle {
        center: s.cfg.pole.unwrap_or_default(),
        radius: s
            .cfg
            .obstacle_radius
            .context("active_boundary needs obstacle_radius")?,
    };
    let mesh = Arc::new(triangulate_with_obstacle(
        &s.domain,
        &s.sigma,
        s.h,
        Some(&ob),
    )?);
    o.mesh = Some(MeshStats::of(&mesh));
    let mut a_grid = s.cfg.a_grid.clone();
    a_grid.sort_by(f64::total_cmp);
    let mut t = Table::new(&["a", "delta", "residual"]);
    let mut deltas = Vec::new();
    for &a in &a_grid {
        let rec = active_boundary(&assemble(mesh.clone(), &s.coeff, a)?)?;
        o.stats.record(rec.residual);
        t.push(row![a, rec.delta, rec.residual]);
        deltas.push(rec.delta);
    }
    t.write(&s.path("active.csv"))?;
    let min = deltas.iter().copied().fold(f64::INFINITY, f64::min);
    o.checks
        .push(check("delta_positive", min > 0.0, min, "> 0"));
    o.checks.push(check(
        "delta_decreasing_in_a",
        deltas.windows(2).all(|w| w[1] < w[0]),
        f64::NAN,
        "strictly decreasing",
    ));
    Ok(o)
}

fn compare(s: &Setup) -> Result<Outcome> {
    let mut o = Outcome::default();
    let pole = s.cfg.pole.context("dirichlet_compare needs pole")?;
    let mesh = s.mesh(&[pole])?;
    o.mesh = Some(MeshStats::of(&mesh));
    let mut t = Table::new(&["a", "curve_id", "sigma_fraction", "measure_fraction"]);
    let mut rows = Vec::new();
    for &a in &s.cfg.a_grid {
        let c = dirichlet_compare(mesh.clone(), &s.domain, &s.coeff, a, pole)?;
        for (curve, l) in [
            (format!("robin a={a}"), &c.robin),
            ("dirichlet".to_string(), &c.dirichlet),
        ] {
            for &(x, y) in &l.points {
                t.push(row![a, curve, x, y]);
            }
        }
        rows.push(json!({
            "a": a,
            "cells": c.cells,
            "s99_robin": c.s99_robin,
            "s99_dirichlet": c.s99_dirichlet,
            "s50_robin": c.robin.quantile(0.5),
            "s50_dirichlet": c.dirichlet.quantile(0.5),
            "robin_fractal_mass": c.robin_fractal_mass,
            "dirichlet_fractal_mass": c.dirichlet_fractal_mass,
        }));
    }
    t.write(&s.path("lorenz.csv"))?;
    o.summary.insert("by_a".into(), Value::Array(rows));
    Ok(o)
}

fn monte_carlo(s: &Setup) -> Result<Outcome> {
    let mut o = Outcome::default();
    let pole = s.cfg.pole.context("monte_carlo_check needs pole")?;
    let mesh = s.mesh(&[pole])?;
    o.mesh = Some(MeshStats::of(&mesh));
    let start = mesh.vertex_nearest(pole);
    let set = BoundarySet::Ball {
        center: s.centers[0],
        radius: s.cfg.radius.unwrap_or_else(|| s.scales[0]),
    };
    let mut t = Table::new(&[
        "a",
        "seed",
        "estimate",
        "stderr",
        "exact",
        "z",
        "mean_steps",
    ]);
    let mut by_a = Vec::new();
    for (i, &a) in s.cfg.a_grid.iter().enumerate() {
        let sys = assemble(mesh.clone(), &s.coeff, a)?;
        let w = sys.harmonic_measure_density(mesh.vertices[start])?;
        o.stats.record(w.residual);
        let exact = w.omega(&set);
        let chain = build_chain(&sys)?;
        if i == 0 {
            absorption_histogram(&chain, start, s.cfg.n_walks, s.cfg.seed)?.write_csv(
                fs::File::create(s.path("histogram.csv"))?,
                &mesh.sigma_weights,
            )?;
        }
        let mut within = 0u64;
        for rep in 0..s.cfg.repetitions {
            let seed = s.cfg.seed + rep;
            let mc = estimate_omega_mc(&chain, &mesh, start, &set, s.cfg.n_walks, seed)?;
            let z = (mc.estimate - exact) / mc.stderr;
            if (mc.estimate - exact).abs() <= MC_Z * mc.stderr {
                within += 1;
            }
            t.push(row![
                a,
                seed,
                mc.estimate,
                mc.stderr,
                exact,
                z,
                mc.mean_steps
            ]);
        }
        let frac = within as f64 / s.cfg.repetitions as f64;
        o.checks.push(check(
            &format!("mc_within_4se_a{a}"),
            frac >= MC_MIN_WITHIN,
            frac,
            ">= 0.95",
        ));
        by_a.push(json!({"a": a, "exact": exact, "within_fraction": frac}));
    }
    t.write(&s.path("mc.csv"))?;
    o.summary
        .insert("start".into(), to_value(mesh.vertices[start]));
    o.summary.insert("by_a".into(), Value::Array(by_a));
    Ok(o)
}

fn regularity(s: &Setup) -> Result<Outcome> {
    let mut o = Outcome::default();
    let n = s.cfg.center_count;
    let k = s.cfg.scale_count;
    let ahlfors = check_ahlfors(&s.domain, &s.sigma, n, k)?;
    let cork = check_corkscrew(&s.domain, n, k)?;
    let nan = |v: Option<f64>| v.unwrap_or(f64::NAN);
    let mut t = Table::new(&["quantity", "value"]);
    t.push(row!["estimated_d", nan(ahlfors.estimated_d)]);
    t.push(row!["lower_const", nan(ahlfors.lower_const)]);
    t.push(row!["upper_const", nan(ahlfors.upper_const)]);
    t.push(row!["doubling_const", nan(ahlfors.doubling_const)]);
    t.push(row!["corkscrew_m", nan(cork.corkscrew_m)]);
    t.push(row!["samples", ahlfors.samples]);
    t.write(&s.path("regularity.csv"))?;
    let target = nominal_dimension(s.domain.family());
    let d = nan(ahlfors.estimated_d);
    o.checks.push(check(
        "dimension",
        (d - target).abs() <= DIMENSION_TOL,
        d,
        &format!("{target:.4} +/- 0.1"),
    ));
    o.summary.insert("ahlfors".into(), to_value(ahlfors));
    o.summary.insert("corkscrew".into(), to_value(cork));
    Ok(o)
}
