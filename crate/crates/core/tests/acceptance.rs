//! Acceptance run: one PASS/FAIL line per criterion, every tolerance pinned
//! below. The process fails if a criterion outside `KNOWN_FAILURES` fails or
//! if one inside it starts passing.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robin_lab::geometry::{
    attach_sigma, check_ahlfors, check_corkscrew, far_pole, gen_cantor_complement,
    gen_koch_snowflake, gen_reference, sample_centers, Point, PolygonalDomain, ReferenceKind,
    SigmaRule,
};
use robin_lab::measure::{
    a_uniformity, active_boundary, density_bound_scan, dirichlet_compare, fit_gamma, harnack_scan,
    match_harnack, pole_robustness, pooled_uniformity, ratio_scan, small_scale_trend, BoundarySet,
    HarnackRecord, MeasureDensity, ScanParams, ScanReport,
};
use robin_lab::mesh::{
    refine_onto_circle, triangulate, triangulate_graded, triangulate_with_obstacle, Mesh, Obstacle,
};
use robin_lab::solver::{
    assemble, l2_error, point_functional, sigma_mean, solve_dirichlet, CoefficientField,
};
use robin_lab::walker::{absorption_histogram, build_chain, estimate_omega_mc};

/// Criteria that do not pass with this discretization.
const KNOWN_FAILURES: &[u32] = &[8, 10];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn mesh_of(d: &PolygonalDomain, rule: SigmaRule, h: f64) -> Arc<Mesh> {
    let s = attach_sigma(d, rule).unwrap();
    Arc::new(triangulate(d, &s, h).unwrap())
}

fn square() -> PolygonalDomain {
    gen_reference(ReferenceKind::Square, 4).unwrap()
}

fn value_at(mesh: &Mesh, values: &[f64], x: Point) -> f64 {
    point_functional(mesh, x)
        .unwrap()
        .iter()
        .map(|&(v, w)| w * values[v])
        .sum()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn disk_oracle() -> Outcome {
    const MAX_ERROR: f64 = 5e-4;
    const TARGET_H: f64 = 1.0 / 64.0;
    const RATIO: (f64, f64) = (3.5, 4.5);
    const MAX_SECS: f64 = 30.0;
    let t = Instant::now();
    let d = gen_reference(ReferenceKind::DiskPolygon, 256).unwrap();
    let s = attach_sigma(&d, SigmaRule::Arclength).unwrap();
    let m0 = triangulate(&d, &s, 0.03).unwrap();
    let m1 = refine_onto_circle(&m0).unwrap();
    let m2 = refine_onto_circle(&m1).unwrap();
    let mut rows = Vec::new();
    for m in [m0, m1, m2] {
        let m = Arc::new(m);
        let f: Vec<f64> = m
            .vertices
            .iter()
            .map(|p| p.x / p.norm().max(1e-300))
            .collect();
        let u = assemble(m.clone(), &CoefficientField::identity(), 1.0)
            .unwrap()
            .solve_robin(&f)
            .unwrap();
        rows.push((m.h, l2_error(&m, &u.nodal_values, |p| 0.5 * p.x)));
    }
    let secs = t.elapsed().as_secs_f64();
    let at_target = rows.iter().find(|r| r.0 <= TARGET_H).map(|r| r.1);
    let ratios: Vec<f64> = rows.windows(2).map(|w| w[0].1 / w[1].1).collect();
    let pass = at_target.is_some_and(|e| e <= MAX_ERROR)
        && ratios.iter().all(|&r| r >= RATIO.0 && r <= RATIO.1)
        && secs <= MAX_SECS;
    outcome(
        pass,
        format!(
            "errors {:?}, ratios {:?}, {secs:.1}s",
            rows.iter()
                .map(|r| format!("h={:.4}:{:.2e}", r.0, r.1))
                .collect::<Vec<_>>(),
            ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>()
        ),
    )
}

fn identity_meshes() -> Vec<(&'static str, Arc<Mesh>, Vec<Point>)> {
    let cantor = gen_cantor_complement(3, 2.0, 1.0).unwrap();
    vec![
        (
            "square",
            mesh_of(&square(), SigmaRule::Arclength, 1.0 / 32.0),
            vec![
                Point::new(0.5, 0.5),
                Point::new(0.1, 0.9),
                Point::new(0.97, 0.03),
            ],
        ),
        (
            "disk",
            mesh_of(
                &gen_reference(ReferenceKind::DiskPolygon, 256).unwrap(),
                SigmaRule::Arclength,
                0.05,
            ),
            vec![Point::new(0.0, 0.0), Point::new(0.9, 0.1)],
        ),
        (
            "cantor3",
            mesh_of(
                &cantor,
                SigmaRule::ComponentUniform,
                cantor.lattice_pitch() / 2.0,
            ),
            vec![
                Point::new(1.25, 0.0),
                Point::new(0.0, 0.0),
                Point::new(-0.7, 0.6),
            ],
        ),
        (
            "koch3",
            mesh_of(
                &gen_koch_snowflake(3, 1.0).unwrap(),
                SigmaRule::EdgeScaled,
                1.0 / 27.0,
            ),
            vec![Point::new(0.5, 0.29), Point::new(0.5, 0.0)],
        ),
    ]
}

fn measure_identities() -> Outcome {
    const MASS_TOL: f64 = 1e-6;
    const NEG_TOL: f64 = 1e-10;
    const ADD_TOL: f64 = 1e-13;
    let (mut worst_mass, mut worst_neg, mut worst_add, mut count) = (0.0f64, 0.0f64, 0.0f64, 0);
    for (_, m, poles) in identity_meshes() {
        let (lo, hi) = bbox_of(&m);
        let mid = Point::new(0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y));
        for a in [1e-3, 1e-1, 1.0, 10.0, 1e3] {
            let sys = assemble(m.clone(), &CoefficientField::identity(), a).unwrap();
            for &x in &poles {
                let w: MeasureDensity = sys.harmonic_measure_density(x).unwrap();
                worst_mass = worst_mass.max((w.total - 1.0).abs());
                worst_neg = worst_neg.max(-w.min_weight());
                // Four quadrants around the bounding-box centre tile the boundary.
                let far = 10.0 * (hi.x - lo.x + hi.y - lo.y);
                let quad = |sx: f64, sy: f64| BoundarySet::BallBox {
                    center: mid,
                    radius: far,
                    lo: Point::new(
                        if sx < 0.0 { mid.x - far } else { mid.x },
                        if sy < 0.0 { mid.y - far } else { mid.y },
                    ),
                    hi: Point::new(
                        if sx < 0.0 { mid.x } else { mid.x + far },
                        if sy < 0.0 { mid.y } else { mid.y + far },
                    ),
                };
                let parts: f64 = [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)]
                    .iter()
                    .map(|&(sx, sy)| w.omega(&quad(sx, sy)))
                    .sum();
                worst_add = worst_add.max((parts - w.omega(&BoundarySet::All)).abs());
                count += 1;
            }
        }
    }
    let pass = worst_mass <= MASS_TOL && worst_neg <= NEG_TOL && worst_add <= ADD_TOL;
    outcome(
        pass,
        format!(
            "{count} densities: max|total-1| {worst_mass:.2e}, max negativity {worst_neg:.2e}, additivity gap {worst_add:.2e}"
        ),
    )
}

fn bbox_of(m: &Mesh) -> (Point, Point) {
    m.vertices.iter().fold(
        (
            Point::new(f64::INFINITY, f64::INFINITY),
            Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        ),
        |(lo, hi), p| {
            (
                Point::new(lo.x.min(p.x), lo.y.min(p.y)),
                Point::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        },
    )
}

fn representation_identity() -> Outcome {
    const TOL: f64 = 1e-8;
    const N_DATA: usize = 10;
    const MAX_SECS: f64 = 60.0;
    let t = Instant::now();
    let cantor = gen_cantor_complement(3, 2.0, 1.0).unwrap();
    let cases = [
        (
            mesh_of(&square(), SigmaRule::Arclength, 1.0 / 64.0),
            Point::new(0.3, 0.7),
        ),
        (
            mesh_of(
                &cantor,
                SigmaRule::ComponentUniform,
                cantor.lattice_pitch() / 2.0,
            ),
            Point::new(0.9, -0.4),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for (m, x) in cases {
        let sys = assemble(m.clone(), &CoefficientField::identity(), 1.0).unwrap();
        let w = sys.harmonic_measure_density(x).unwrap();
        for _ in 0..N_DATA {
            let f: Vec<f64> = (0..m.vertices.len())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let u = sys.solve_robin(&f).unwrap();
            worst = worst.max((w.pair(&f) - value_at(&m, &u.nodal_values, x)).abs());
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        worst <= TOL && secs <= MAX_SECS,
        format!("max |<w,f> - u(X)| {worst:.2e}, {secs:.1}s"),
    )
}

/// Uniform noise, a single boundary spike, or a random half-plane step.
fn random_data(rng: &mut ChaCha8Rng, mesh: &Mesh, kind: usize) -> Vec<f64> {
    let n = mesh.vertices.len();
    match kind % 3 {
        0 => (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        1 => {
            let mut f = vec![0.0; n];
            let v = mesh.boundary_vertices[rng.gen_range(0..mesh.boundary_vertices.len())];
            f[v] = 1.0;
            f
        }
        _ => {
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let c: f64 = rng.gen_range(-0.5..0.5);
            mesh.vertices
                .iter()
                .map(|p| {
                    if p.x * th.cos() + p.y * th.sin() > c {
                        1.0
                    } else {
                        -1.0
                    }
                })
                .collect()
        }
    }
}

fn maximum_principle() -> Outcome {
    const N_DATA: usize = 50;
    const EPS_FACTOR: f64 = 10.0;
    let coeffs = [
        ("identity", CoefficientField::identity()),
        (
            "checkerboard",
            CoefficientField::checkerboard(
                0.125,
                [[1.0, 0.0], [0.0, 1.0]],
                [[10.0, 0.0], [0.0, 10.0]],
            )
            .unwrap(),
        ),
        (
            "nonsymmetric",
            CoefficientField::constant([[1.0, 0.3], [-0.3, 1.0]]).unwrap(),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut violations, mut solves, mut worst) = (0, 0, f64::NEG_INFINITY);
    for (_, m, _) in identity_meshes() {
        for (_, c) in &coeffs {
            let sys = assemble(m.clone(), c, 1.0).unwrap();
            for k in 0..N_DATA {
                let f = random_data(&mut rng, &m, k);
                let (lo, hi) = m
                    .boundary_vertices
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
                        (l.min(f[v]), h.max(f[v]))
                    });
                let u = sys.solve_robin(&f).unwrap();
                let eps = EPS_FACTOR * u.residual_norm;
                let excess = u
                    .nodal_values
                    .iter()
                    .map(|&x| (lo - x).max(x - hi))
                    .fold(f64::NEG_INFINITY, f64::max);
                worst = worst.max(excess);
                if excess > eps {
                    violations += 1;
                }
                solves += 1;
            }
        }
    }
    outcome(
        violations == 0,
        format!("{solves} solves over 4 families x 3 coefficients, {violations} violations, max excess {worst:.2e}"),
    )
}

fn cantor4_scan() -> (ScanReport, f64) {
    let t = Instant::now();
    let d = gen_cantor_complement(4, 6.0, 1.0).unwrap();
    let m = mesh_of(&d, SigmaRule::ComponentUniform, d.lattice_pitch() / 4.0);
    let params = ScanParams {
        a_grid: vec![1e-2, 1e-1, 1.0, 10.0, 100.0, 1e3, 1e4],
        scales: (0..8).map(|k| 0.25 * 0.5f64.powi(k)).collect(),
        centers: sample_centers(&d, 8)
            .iter()
            .map(|b| b.position(&d))
            .collect(),
        c_poles: vec![4.0, 10.0],
    };
    let rep = ratio_scan(m, &d, &CoefficientField::identity(), &params).unwrap();
    (rep, t.elapsed().as_secs_f64())
}

fn small_scale_flatness(rep: &ScanReport, secs: f64) -> Outcome {
    const SLOPE_BAND: f64 = 0.05;
    const MAX_CHANGE: f64 = 0.25;
    const A_FACTOR: f64 = 100.0;
    const MAX_SECS: f64 = 600.0;
    let trend = small_scale_trend(rep).unwrap();
    let pooled = pooled_uniformity(rep, A_FACTOR).unwrap();
    let pairs: Vec<String> = a_uniformity(rep, A_FACTOR)
        .iter()
        .map(|p| format!("{:e}->{:e}:{:.2}", p.a, p.a_scaled, p.relative_change))
        .collect();
    let pass = trend.slope.abs() <= SLOPE_BAND
        && pooled.relative_change < MAX_CHANGE
        && rep.failures.is_empty()
        && secs <= MAX_SECS;
    outcome(
        pass,
        format!(
            "slope {:.4}, pooled x100 change {:.3} over {} groups (per pair {pairs:?}), summary {:.3}, pole factor {:.2}, {} records, {secs:.0}s",
            trend.slope,
            pooled.relative_change,
            pooled.matched_groups,
            rep.summary,
            pole_robustness(rep).unwrap_or(f64::NAN),
            rep.records.len()
        ),
    )
}

fn large_scale_degeneracy(rep: &ScanReport) -> Outcome {
    const MAX_RELATIVE_RESIDUAL: f64 = 0.25;
    match fit_gamma(rep) {
        Ok(g) => outcome(
            g.gamma.is_finite() && g.relative_residual <= MAX_RELATIVE_RESIDUAL,
            format!(
                "gamma {:.4} in [{:.4}, {:.4}], relative residual {:.3}, {} groups",
                g.gamma, g.band.0, g.band.1, g.relative_residual, g.fit.n
            ),
        ),
        Err(e) => outcome(false, format!("fit failed: {e}")),
    }
}

fn harnack_on(
    d: &PolygonalDomain,
    rule: SigmaRule,
    x0: Point,
    h_min: f64,
    scales: &[f64],
    a_grid: &[f64],
) -> Vec<HarnackRecord> {
    const C_POLE: f64 = 10.0;
    let r_max = scales.iter().copied().fold(0.0, f64::max);
    let pole = far_pole(d, x0, C_POLE * r_max, 2.0 * C_POLE * r_max).unwrap();
    let s = attach_sigma(d, rule).unwrap();
    let m = Arc::new(triangulate_graded(d, &s, h_min, &[x0, pole]).unwrap());
    harnack_scan(
        m,
        d,
        &CoefficientField::identity(),
        a_grid,
        &[x0],
        scales,
        C_POLE,
    )
    .unwrap()
}

fn boundary_harnack() -> Outcome {
    const A_PARAM_MAX: f64 = 1e-2;
    const MIN_RATIO: f64 = 0.01;
    const MAX_CHANGE: f64 = 0.30;
    const A_FACTOR: f64 = 100.0;
    let a_grid = [1e-3, 1e-2, 1e-1, 1.0, 10.0];
    let sq = harnack_on(
        &square(),
        SigmaRule::Arclength,
        Point::new(0.5, 0.0),
        1.0 / 8192.0,
        &(0..8).map(|k| 0.05 * 0.5f64.powi(k)).collect::<Vec<_>>(),
        &a_grid,
    );
    let cantor = gen_cantor_complement(3, 2.0, 1.0).unwrap();
    let side = cantor.lattice_pitch();
    let (lo, hi) = robin_lab::geometry::bbox(&cantor.holes()[0]);
    let x0 = Point::new(0.5 * (lo.x + hi.x), lo.y);
    let ca = harnack_on(
        &cantor,
        SigmaRule::ComponentUniform,
        x0,
        side / 128.0,
        &(-2..=6).map(|k| side * 0.5f64.powi(k)).collect::<Vec<_>>(),
        &a_grid,
    );
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, recs) in [("square", sq), ("cantor3", ca)] {
        let small: Vec<&HarnackRecord> = recs.iter().filter(|r| r.a_param <= A_PARAM_MAX).collect();
        let min_ratio = small.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        let pairs: Vec<_> = match_harnack(&recs, A_FACTOR)
            .into_iter()
            .filter(|p| p.a_param <= A_PARAM_MAX && p.a_param_scaled <= A_PARAM_MAX)
            .collect();
        let change = pairs
            .iter()
            .map(|p| p.relative_change())
            .fold(0.0, f64::max);
        pass &= !small.is_empty()
            && !pairs.is_empty()
            && min_ratio >= MIN_RATIO
            && change <= MAX_CHANGE;
        parts.push(format!(
            "{name}: {} records, min ratio {min_ratio:.4}, {} matched pairs, max change {change:.2e}",
            small.len(),
            pairs.len()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn density_lower_bound() -> Outcome {
    const MAX_RELATIVE_RESIDUAL: f64 = 0.10;
    const WINDOW: (f64, f64) = (1e-2, 1.0);
    let m = mesh_of(&square(), SigmaRule::Arclength, 1.0 / 128.0);
    let x0 = Point::new(0.5, 0.0);
    let r = 0.1;
    let sigma_ball = 2.0 * r;
    let a_grid: Vec<f64> = (0..=20)
        .map(|i| 10f64.powf(-2.0 + 0.1 * i as f64) / sigma_ball)
        .collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [4.0, 10.0] {
        let scan = density_bound_scan(m.clone(), &CoefficientField::identity(), &a_grid, x0, r, k)
            .unwrap();
        let fit = scan.fit(WINDOW.0, WINDOW.1).unwrap();
        pass &= fit.fit.slope < 0.0 && fit.relative_residual <= MAX_RELATIVE_RESIDUAL;
        parts.push(format!(
            "K={k}: slope {:.4}, relative residual {:.3} over {} points",
            fit.fit.slope, fit.relative_residual, fit.points
        ));
    }
    outcome(pass, parts.join("; "))
}

fn active_boundary_check() -> Outcome {
    const MIN_DELTA: f64 = 1e-6;
    let d = gen_cantor_complement(3, 2.0, 1.0).unwrap();
    let s = attach_sigma(&d, SigmaRule::ComponentUniform).unwrap();
    let ob = Obstacle {
        center: Point::new(0.0, 0.0),
        radius: 0.25 * d.base_scale(),
    };
    let m =
        Arc::new(triangulate_with_obstacle(&d, &s, d.lattice_pitch() / 2.0, Some(&ob)).unwrap());
    let deltas: Vec<f64> = [0.1, 1.0, 10.0]
        .iter()
        .map(|&a| {
            active_boundary(&assemble(m.clone(), &CoefficientField::identity(), a).unwrap())
                .unwrap()
                .delta
        })
        .collect();
    let pass =
        deltas.iter().all(|&x| x >= MIN_DELTA) && deltas[0] > deltas[1] && deltas[1] > deltas[2];
    outcome(
        pass,
        format!(
            "delta at a = 0.1, 1, 10: {:.4e} {:.4e} {:.4e}",
            deltas[0], deltas[1], deltas[2]
        ),
    )
}

fn dimension_drop() -> Outcome {
    const MIN_DIRICHLET_DROP: f64 = 0.20;
    const MAX_ROBIN_CHANGE: f64 = 0.10;
    const MAX_SECS: f64 = 900.0;
    let t = Instant::now();
    let pole = Point::new(1.25, 0.0);
    let a = 1.0;
    let mut rows = Vec::new();
    for g in [2, 4] {
        let d = gen_cantor_complement(g, 2.0, 1.0).unwrap();
        let m = mesh_of(&d, SigmaRule::ComponentUniform, d.lattice_pitch() / 2.0);
        rows.push(dirichlet_compare(m, &d, &CoefficientField::identity(), a, pole).unwrap());
    }
    let secs = t.elapsed().as_secs_f64();
    let drop = 1.0 - rows[1].s99_dirichlet / rows[0].s99_dirichlet;
    let change = (rows[1].s99_robin / rows[0].s99_robin - 1.0).abs();
    let pass = drop >= MIN_DIRICHLET_DROP && change <= MAX_ROBIN_CHANGE && secs <= MAX_SECS;
    outcome(
        pass,
        format!(
            "s99 Dirichlet {:.4} -> {:.4} (drop {:.1}%), s99 Robin {:.4} -> {:.4} (change {:.1}%), s50 Dirichlet {:.4} -> {:.4}, {secs:.1}s",
            rows[0].s99_dirichlet,
            rows[1].s99_dirichlet,
            100.0 * drop,
            rows[0].s99_robin,
            rows[1].s99_robin,
            100.0 * change,
            rows[0].dirichlet.quantile(0.5),
            rows[1].dirichlet.quantile(0.5)
        ),
    )
}

fn monte_carlo() -> Outcome {
    const REPS: u64 = 100;
    const MIN_WITHIN: usize = 95;
    const N_WALKS: u64 = 100_000;
    const Z: f64 = 4.0;
    let m = mesh_of(&square(), SigmaRule::Arclength, 1.0 / 8.0);
    let sys = assemble(m.clone(), &CoefficientField::identity(), 1.0).unwrap();
    let chain = build_chain(&sys).unwrap();
    let x = m.vertex_nearest(Point::new(0.375, 0.5));
    let e = BoundarySet::Ball {
        center: Point::new(0.0, 0.3),
        radius: 0.3,
    };
    let exact = sys
        .harmonic_measure_density(m.vertices[x])
        .unwrap()
        .omega(&e);
    let mut within = 0;
    let mut first = None;
    for seed in 0..REPS {
        let mc = estimate_omega_mc(&chain, &m, x, &e, N_WALKS, seed).unwrap();
        if (mc.estimate - exact).abs() <= Z * mc.stderr {
            within += 1;
        }
        first.get_or_insert(mc);
    }
    let again = estimate_omega_mc(&chain, &m, x, &e, N_WALKS, 0).unwrap();
    let bitwise = first.is_some_and(|f| f.estimate.to_bits() == again.estimate.to_bits())
        && absorption_histogram(&chain, x, N_WALKS, 0).unwrap()
            == absorption_histogram(&chain, x, N_WALKS, 0).unwrap();
    outcome(
        within >= MIN_WITHIN && bitwise,
        format!("{within}/{REPS} within 4 stderr of {exact:.5}, bitwise reproducible: {bitwise}"),
    )
}

fn limits() -> Outcome {
    const NEUMANN_TOL: f64 = 1e-4;
    const DIRICHLET_TOL: f64 = 1e-3;
    let m = mesh_of(&square(), SigmaRule::Arclength, 1.0 / 64.0);
    let f: Vec<f64> = m
        .vertices
        .iter()
        .map(|p| (5.0 * p.x).sin() + p.y * p.y)
        .collect();
    let id = CoefficientField::identity();
    let mean = sigma_mean(&m, &f);
    let small = assemble(m.clone(), &id, 1e-6)
        .unwrap()
        .solve_robin(&f)
        .unwrap();
    let gap_n = small
        .nodal_values
        .iter()
        .map(|v| (v - mean).abs())
        .fold(0.0, f64::max);
    let large = assemble(m.clone(), &id, 1e6)
        .unwrap()
        .solve_robin(&f)
        .unwrap();
    let ud = solve_dirichlet(&m, &id, &f).unwrap();
    let gap_d = max_abs_diff(&large.nodal_values, &ud.nodal_values);
    outcome(
        gap_n <= NEUMANN_TOL && gap_d <= DIRICHLET_TOL,
        format!("a=1e-6: |u - mean| {gap_n:.2e}; a=1e6: |u - u_D| {gap_d:.2e}"),
    )
}

fn regularity() -> Outcome {
    const D_TOL: f64 = 0.1;
    const CORKSCREW_BAND: f64 = 0.25;
    let koch = gen_koch_snowflake(5, 1.0).unwrap();
    let dk = check_ahlfors(
        &koch,
        &attach_sigma(&koch, SigmaRule::EdgeScaled).unwrap(),
        64,
        8,
    )
    .unwrap()
    .estimated_d
    .unwrap();
    let cantor = gen_cantor_complement(5, 2.0, 1.0).unwrap();
    let dc = check_ahlfors(
        &cantor,
        &attach_sigma(&cantor, SigmaRule::ComponentUniform).unwrap(),
        64,
        10,
    )
    .unwrap()
    .estimated_d
    .unwrap();
    let ms: Vec<f64> = (2..=4)
        .map(|g| {
            check_corkscrew(&gen_cantor_complement(g, 2.0, 1.0).unwrap(), 32, 10)
                .unwrap()
                .corkscrew_m
                .unwrap()
        })
        .collect();
    let (lo, hi) = ms
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &m| (l.min(m), h.max(m)));
    let koch_d = 4f64.ln() / 3f64.ln();
    let pass = (dk - koch_d).abs() <= D_TOL
        && (dc - 1.0).abs() <= D_TOL
        && hi / lo - 1.0 <= CORKSCREW_BAND;
    outcome(
        pass,
        format!("Koch g=5 d {dk:.4} (target {koch_d:.4}), Cantor g=5 d {dc:.4}, corkscrew M over g=2..4 {ms:.3?}"),
    )
}

fn main() -> ExitCode {
    let t = Instant::now();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut run = |id: u32, name: &'static str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = f();
        println!(
            "[{}] {id:>2} {name}: {} ({:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        results.push((id, name, o));
    };
    run(1, "disk oracle", &disk_oracle);
    run(2, "probability-measure identities", &measure_identities);
    run(3, "representation identity", &representation_identity);
    run(4, "maximum principle", &maximum_principle);
    let (scan, scan_secs) = cantor4_scan();
    run(5, "small-scale flatness", &|| {
        small_scale_flatness(&scan, scan_secs)
    });
    run(6, "large-scale degeneracy", &|| {
        large_scale_degeneracy(&scan)
    });
    run(7, "boundary Harnack", &boundary_harnack);
    run(
        8,
        "density lower bound functional form",
        &density_lower_bound,
    );
    run(9, "active boundary", &active_boundary_check);
    run(10, "dimension-drop contrast", &dimension_drop);
    run(11, "Monte Carlo equivalence", &monte_carlo);
    run(12, "limits", &limits);
    run(13, "geometry regularity", &regularity);
    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    let unexpected: Vec<u32> = failed
        .iter()
        .copied()
        .filter(|id| !KNOWN_FAILURES.contains(id))
        .collect();
    println!(
        "acceptance: {}/{} pass, failing {failed:?} (known {KNOWN_FAILURES:?}), {:.0}s",
        results.len() - failed.len(),
        results.len(),
        t.elapsed().as_secs_f64()
    );
    let stale: Vec<u32> = KNOWN_FAILURES
        .iter()
        .copied()
        .filter(|id| !failed.contains(id))
        .collect();
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
    }
    if !stale.is_empty() {
        println!("known failures now passing, update KNOWN_FAILURES: {stale:?}");
    }
    if unexpected.is_empty() && stale.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
