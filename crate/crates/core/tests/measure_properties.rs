use std::sync::Arc;

use proptest::prelude::*;
use robin_lab::geometry::{
    attach_sigma, far_pole, gen_cantor_complement, gen_koch_snowflake, gen_reference, Point,
    PolygonalDomain, ReferenceKind, SigmaRule,
};
use robin_lab::measure::{
    active_boundary, density_bound_scan, e_sets, oscillation_decay, ratio_scan, sigma_of,
    BoundarySet, ScanParams,
};
use robin_lab::mesh::{triangulate, triangulate_graded, triangulate_with_obstacle, Mesh, Obstacle};
use robin_lab::solver::{assemble, CoefficientField};

fn mesh_of(d: &PolygonalDomain, rule: SigmaRule, h: f64) -> Arc<Mesh> {
    let s = attach_sigma(d, rule).unwrap();
    Arc::new(triangulate(d, &s, h).unwrap())
}

fn square() -> PolygonalDomain {
    gen_reference(ReferenceKind::Square, 4).unwrap()
}

fn family_meshes() -> Vec<(Arc<Mesh>, Point)> {
    vec![
        (
            mesh_of(&square(), SigmaRule::Arclength, 1.0 / 16.0),
            Point::new(0.3, 0.6),
        ),
        (
            mesh_of(
                &gen_reference(ReferenceKind::DiskPolygon, 64).unwrap(),
                SigmaRule::Arclength,
                0.125,
            ),
            Point::new(0.2, -0.4),
        ),
        (
            mesh_of(
                &gen_cantor_complement(2, 2.0, 1.0).unwrap(),
                SigmaRule::ComponentUniform,
                1.0 / 16.0,
            ),
            Point::new(0.8, 0.1),
        ),
        (
            mesh_of(
                &gen_koch_snowflake(2, 1.0).unwrap(),
                SigmaRule::EdgeScaled,
                1.0 / 9.0,
            ),
            Point::new(0.5, 0.3),
        ),
    ]
}

#[test]
fn densities_are_probability_measures() {
    for (m, x) in family_meshes() {
        for a in [1e-2, 1.0, 1e2] {
            let w = assemble(m.clone(), &CoefficientField::identity(), a)
                .unwrap()
                .harmonic_measure_density(x)
                .unwrap();
            assert!((w.total - 1.0).abs() <= 1e-6, "{}", w.total);
            assert!((w.omega(&BoundarySet::All) - 1.0).abs() <= 1e-6);
            assert!(w.min_weight() >= -1e-10);
        }
    }
}

#[test]
fn disk_center_sees_uniform_measure() {
    let m = mesh_of(
        &gen_reference(ReferenceKind::DiskPolygon, 64).unwrap(),
        SigmaRule::Arclength,
        0.125,
    );
    let w = assemble(m, &CoefficientField::identity(), 1.0)
        .unwrap()
        .harmonic_measure_density(Point::new(0.0, 0.0))
        .unwrap();
    let quarter = BoundarySet::BallBox {
        center: Point::new(0.0, 0.0),
        radius: 2.0,
        lo: Point::new(0.0, 0.0),
        hi: Point::new(2.0, 2.0),
    };
    assert!((w.omega(&quarter) - 0.25).abs() <= 1e-3);
}

#[test]
fn full_ball_ratio_is_one() {
    let d = square();
    let m = mesh_of(&d, SigmaRule::Arclength, 1.0 / 32.0);
    let params = ScanParams {
        a_grid: vec![0.1, 10.0],
        scales: vec![0.1, 0.05],
        centers: vec![Point::new(0.5, 0.0), Point::new(0.0, 0.4)],
        c_poles: vec![4.0],
    };
    let rep = ratio_scan(m, &d, &CoefficientField::identity(), &params).unwrap();
    assert!(rep.failures.is_empty());
    assert!(!rep.records.is_empty());
    for r in rep.records.iter().filter(|r| r.e_id == 0) {
        assert_eq!(r.ratio, 1.0);
    }
    for r in &rep.records {
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
    }
}

#[test]
fn scaling_domain_and_a_together_leaves_measure_unchanged() {
    let lambda = 4.0;
    let d = gen_cantor_complement(2, 2.0, 1.0).unwrap();
    let big = d.scaled(lambda);
    let m1 = mesh_of(&d, SigmaRule::Arclength, 1.0 / 16.0);
    let m2 = mesh_of(&big, SigmaRule::Arclength, lambda / 16.0);
    let x = Point::new(0.8, 0.1);
    let e = BoundarySet::Ball {
        center: Point::new(0.0, 0.0),
        radius: 0.6,
    };
    let e_big = BoundarySet::Ball {
        center: Point::new(0.0, 0.0),
        radius: 0.6 * lambda,
    };
    let w1 = assemble(m1, &CoefficientField::identity(), 2.0)
        .unwrap()
        .harmonic_measure_density(x)
        .unwrap();
    let w2 = assemble(m2, &CoefficientField::identity(), 2.0 / lambda)
        .unwrap()
        .harmonic_measure_density(Point::new(x.x * lambda, x.y * lambda))
        .unwrap();
    assert!((w1.omega(&e) - w2.omega(&e_big)).abs() < 1e-8);
}

#[test]
fn green_oscillation_decays_near_the_boundary() {
    let d = square();
    let s = attach_sigma(&d, SigmaRule::Arclength).unwrap();
    let x0 = Point::new(0.5, 0.0);
    let pole = far_pole(&d, x0, 0.4, 0.8).unwrap();
    let m = Arc::new(triangulate_graded(&d, &s, 1.0 / 1024.0, &[x0, pole]).unwrap());
    let g = assemble(m.clone(), &CoefficientField::identity(), 1.0)
        .unwrap()
        .green_column(pole)
        .unwrap();
    let osc = oscillation_decay(&m, &g.nodal_values, x0, 0.05, 6, Some(pole)).unwrap();
    assert!(osc.levels.len() >= 5);
    assert!(osc.eta <= 0.95, "{osc:?}");
}

#[test]
fn density_scan_with_full_data_is_flat() {
    let m = mesh_of(&square(), SigmaRule::Arclength, 1.0 / 16.0);
    let scan = density_bound_scan(
        m,
        &CoefficientField::identity(),
        &[0.01, 1.0, 100.0],
        Point::new(0.5, 0.0),
        0.1,
        100.0,
    )
    .unwrap();
    for row in &scan.rows {
        assert!((row.min_u - 1.0).abs() < 1e-10);
    }
}

#[test]
fn active_boundary_trends() {
    let d = gen_cantor_complement(2, 2.0, 1.0).unwrap();
    let s = attach_sigma(&d, SigmaRule::ComponentUniform).unwrap();
    let h = d.lattice_pitch() / 2.0;
    let delta = |a: f64, radius: f64| {
        let ob = Obstacle {
            center: Point::new(0.0, 0.0),
            radius,
        };
        let m = Arc::new(triangulate_with_obstacle(&d, &s, h, Some(&ob)).unwrap());
        active_boundary(&assemble(m, &CoefficientField::identity(), a).unwrap())
            .unwrap()
            .delta
    };
    let by_a: Vec<f64> = [10.0, 1.0, 0.1].iter().map(|&a| delta(a, 0.25)).collect();
    assert!(
        by_a[0] > 0.0 && by_a.windows(2).all(|p| p[1] > p[0]),
        "{by_a:?}"
    );
    assert!(delta(1.0, 0.125) <= by_a[1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn measure_is_additive_and_monotone(cut in 0.05f64..0.95, r in 0.05f64..0.7, cy in 0.0f64..1.0) {
        let m = mesh_of(&square(), SigmaRule::Arclength, 1.0 / 16.0);
        let w = assemble(m, &CoefficientField::identity(), 1.0)
            .unwrap()
            .harmonic_measure_density(Point::new(0.4, 0.55))
            .unwrap();
        let c = Point::new(0.0, cy);
        let whole = BoundarySet::Ball { center: c, radius: r };
        let part = |lo: Point, hi: Point| BoundarySet::BallBox { center: c, radius: r, lo, hi };
        let below = part(Point::new(-1.0, -1.0), Point::new(2.0, cut));
        let above = part(Point::new(-1.0, cut), Point::new(2.0, 2.0));
        let sum = w.omega(&below) + w.omega(&above);
        prop_assert!((sum - w.omega(&whole)).abs() <= 1e-14);
        prop_assert!(w.omega(&below) <= w.omega(&whole) + 1e-15);
        let half = BoundarySet::Ball { center: c, radius: 0.5 * r };
        prop_assert!(w.omega(&half) <= w.omega(&whole) + 1e-15);
    }

    #[test]
    fn sandwich_bounds_hold(cx in 0.1f64..0.9, r in 0.05f64..0.3, log_a in -2.0f64..2.0) {
        let m = mesh_of(&square(), SigmaRule::Arclength, 1.0 / 16.0);
        let w = assemble(m.clone(), &CoefficientField::identity(), 10f64.powf(log_a))
            .unwrap()
            .harmonic_measure_density(Point::new(0.5, 0.7))
            .unwrap();
        let x0 = Point::new(cx, 0.0);
        let delta = BoundarySet::Ball { center: x0, radius: r };
        let (lo, hi) = w.weight_range(&delta).unwrap();
        let (s_d, w_d) = (sigma_of(&m, &delta), w.omega(&delta));
        for e in e_sets(x0, r) {
            let s_e = sigma_of(&m, &e);
            if s_e <= 1e-12 * s_d {
                continue;
            }
            let (sr, or) = (s_e / s_d, w.omega(&e) / w_d);
            prop_assert!(or >= lo / hi * sr * (1.0 - 1e-12));
            prop_assert!(or <= hi / lo * sr * (1.0 + 1e-12));
        }
    }
}
