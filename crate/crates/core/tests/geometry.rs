use std::f64::consts::{PI, TAU};

use minent_core::geodesic::{count_arcs, integrate, orbit_count, shoot_arcs, ShootOptions};
use minent_core::geom::deck::disk_distance;
use minent_core::geom::*;
use minent_core::GeodesicState;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn lattice_oracle(d: [f64; 2], sides: [f64; 2], t: f64) -> usize {
    let mut n = 0;
    let r = (t / sides[0].min(sides[1])).ceil() as i64 + 2;
    for m in -r..=r {
        for k in -r..=r {
            let x = d[0] + m as f64 * sides[0];
            let y = d[1] + k as f64 * sides[1];
            if x.hypot(y) <= t {
                n += 1;
            }
        }
    }
    n
}

#[test]
fn christoffel_oracles() {
    let torus = ChartedMetric::flat_torus(vec![1.0, 2.0]).unwrap();
    let g = christoffel(&torus, 0, &[0.3, 0.7]).unwrap();
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(g.get(k, i, j), 0.0);
            }
        }
    }
    let sphere = ChartedMetric::round_sphere(1.0).unwrap();
    let th = 0.9;
    let g = christoffel(&sphere, 0, &[th, 1.0]).unwrap();
    assert!((g.get(0, 1, 1) + th.sin() * th.cos()).abs() < 1e-9);
    assert!((g.get(1, 0, 1) - th.cos() / th.sin()).abs() < 1e-9);
    assert!(g.is_symmetric());
    let hp = ChartedMetric::half_plane();
    let y = 1.7;
    let g = christoffel(&hp, 0, &[0.2, y]).unwrap();
    assert!((g.get(0, 0, 1) + 1.0 / y).abs() < 1e-9);
}

#[test]
fn finite_differences_match_analytic_partials() {
    for (m, x) in [
        (ChartedMetric::round_sphere(1.3).unwrap(), vec![0.8, 2.0]),
        (ChartedMetric::half_plane(), vec![0.1, 0.6]),
        (ChartedMetric::genus2_octagon(), vec![0.2, -0.3]),
    ] {
        let a = christoffel_with(&m, 0, &x, Differentiation::Auto).unwrap();
        let f = christoffel_with(&m, 0, &x, Differentiation::FiniteDifference).unwrap();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert!((a.get(k, i, j) - f.get(k, i, j)).abs() < 1e-6);
                }
            }
        }
    }
}

#[test]
fn sectional_curvature_examples() {
    let u = [1.0, 0.3];
    let v = [0.2, 1.0];
    assert!((sectional_curvature(&ChartedMetric::round_sphere(1.0).unwrap(), 0, &[1.0, 1.0], &u, &v).unwrap() - 1.0).abs() < 1e-6);
    assert!(sectional_curvature(&ChartedMetric::flat_torus(vec![1.0, 1.0]).unwrap(), 0, &[0.5, 0.5], &u, &v).unwrap().abs() < 1e-12);
    assert!((sectional_curvature(&ChartedMetric::genus2_octagon(), 0, &[0.1, 0.2], &u, &v).unwrap() + 1.0).abs() < 1e-6);
    assert!(matches!(
        sectional_curvature(&ChartedMetric::round_sphere(1.0).unwrap(), 0, &[1.0, 1.0], &u, &u),
        Err(GeometryError::DegeneratePlane)
    ));
}

#[test]
fn curvature_bounds_examples() {
    let r = curvature_bounds(&ChartedMetric::round_sphere(1.0).unwrap(), &SampleGrid::uniform(5)).unwrap();
    assert!((r.k_min - 1.0).abs() < 1e-4 && (r.k_max - 1.0).abs() < 1e-4 && (r.k_bound - 1.0).abs() < 1e-4);
    let r = curvature_bounds(&ChartedMetric::flat_torus(vec![1.0, 1.0]).unwrap(), &SampleGrid::uniform(3)).unwrap();
    assert_eq!(r.k_bound, 0.0);
    let prod = ChartedMetric::product(ChartedMetric::round_sphere(1.0).unwrap(), ChartedMetric::flat_torus(vec![1.0, 1.0]).unwrap());
    let r = curvature_bounds(&prod, &SampleGrid::uniform(2)).unwrap();
    assert!(r.k_min.abs() < 1e-4 && (r.k_max - 1.0).abs() < 1e-4, "{r:?}");
    assert!(r.ricci_min >= 3.0 * r.k_min - 1e-6);
}

#[test]
fn volume_examples() {
    let spec = QuadratureSpec::default();
    assert!((volume(&ChartedMetric::round_sphere(1.0).unwrap(), &spec).unwrap() - 4.0 * PI).abs() < 1e-6);
    assert!((volume(&ChartedMetric::round_sphere(2.0).unwrap(), &spec).unwrap() - 16.0 * PI).abs() < 1e-5);
    assert!((volume(&ChartedMetric::flat_torus(vec![1.5, 2.0]).unwrap(), &spec).unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn product_metric_is_block_diagonal() {
    let s = ChartedMetric::round_sphere(1.0).unwrap();
    let t = ChartedMetric::flat_torus(vec![1.0, 2.0]).unwrap();
    let p = ChartedMetric::product(s.clone(), t.clone());
    let x = [1.0, 2.0, 0.3, 0.4];
    let g = p.tensor(0, &x).unwrap();
    let gs = s.tensor(0, &x[..2]).unwrap();
    let gt = t.tensor(0, &x[2..]).unwrap();
    assert_eq!(g.view((0, 0), (2, 2)), gs);
    assert_eq!(g.view((2, 2), (2, 2)), gt);
    assert_eq!(g.view((0, 2), (2, 2)), DMatrix::<f64>::zeros(2, 2));
}

#[test]
fn integrator_examples() {
    let torus = ChartedMetric::flat_torus(vec![1.0, 1.0]).unwrap();
    let e = integrate(&torus, &GeodesicState::new(0, vec![0.2, 0.3], vec![0.0, 1.0]), 1.0, 1e-3).unwrap();
    assert!((e.x[0] - 0.2).abs() < 1e-12 && (e.x[1] - 0.3).abs() < 1e-12);
    let sphere = ChartedMetric::round_sphere(1.0).unwrap();
    let s = GeodesicState::new(0, vec![0.7, 0.1], vec![-0.8, 0.6 / 0.7f64.sin()]);
    let e = integrate(&sphere, &s, TAU, 1e-3).unwrap();
    let (a, b) = (sphere.ambient_position(0, &s.x), sphere.ambient_position(e.chart, &e.x));
    assert!(a.iter().zip(&b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt() < 1e-5);
    let hp = ChartedMetric::half_plane();
    let e = integrate(&hp, &GeodesicState::new(0, vec![0.0, 1.0], vec![0.0, 1.0]), 1.0, 1e-3).unwrap();
    assert!((e.x[1] - 1f64.exp()).abs() < 1e-6);
}

#[test]
fn speed_drift_at_default_step() {
    let sphere = ChartedMetric::round_sphere(1.0).unwrap();
    let s = GeodesicState::new(0, vec![1.2, 0.4], vec![0.3, 0.9]);
    let v0 = s.speed(&sphere).unwrap();
    let t = 5.0;
    let e = integrate(&sphere, &s, t, 1e-3).unwrap();
    assert!(((e.speed(&sphere).unwrap() - v0) / v0).abs() <= 1e-6 * t);
}

/// Endpoint error in hyperbolic distance along `y(t) = e^t`.
fn vertical_error(step: f64) -> f64 {
    let hp = ChartedMetric::half_plane();
    let t = 2.0;
    let e = integrate(&hp, &GeodesicState::new(0, vec![0.0, 1.0], vec![0.0, 1.0]), t, step).unwrap();
    (e.x[1].ln() - t).abs()
}

#[test]
fn rk4_is_fourth_order() {
    let ratio = vertical_error(0.1) / vertical_error(0.05);
    assert!((ratio - 16.0).abs() <= 2.0, "{ratio}");
    assert!((vertical_error(1e-3) - vertical_error(5e-4)).abs() <= 1e-7);
}

#[test]
fn torus_arc_counts_match_lattice() {
    let m = ChartedMetric::flat_torus(vec![1.0, 1.0]).unwrap();
    let p = [0.21, 0.37];
    let q = [0.74, 0.91];
    for t in [1.0, 2.5, 5.0] {
        let n = count_arcs(&m, (0, &p), (0, &q), t, 720, &ShootOptions::default()).unwrap();
        assert_eq!(n, lattice_oracle([q[0] - p[0], q[1] - p[1]], [1.0, 1.0], t), "T = {t}");
    }
    let back = count_arcs(&m, (0, &q), (0, &p), 5.0, 720, &ShootOptions::default()).unwrap();
    assert_eq!(back, lattice_oracle([p[0] - q[0], p[1] - q[1]], [1.0, 1.0], 5.0));
}

#[test]
fn half_offset_count_at_radius_1_6() {
    let m = ChartedMetric::flat_torus(vec![1.0, 1.0]).unwrap();
    let p = [0.75, 0.5];
    let q = [0.25, 0.5];
    let n = count_arcs(&m, (0, &p), (0, &q), 1.6, 720, &ShootOptions::default()).unwrap();
    assert_eq!(n, lattice_oracle([-0.5, 0.0], [1.0, 1.0], 1.6));
    assert_eq!(n, 8);
}

#[test]
#[ignore = "the quoted count of 3 disagrees with lattice enumeration, which gives 8 vectors of norm <= 1.6 in (-0.5, 0) + Z^2"]
fn half_offset_count_quoted_as_three() {
    let m = ChartedMetric::flat_torus(vec![1.0, 1.0]).unwrap();
    let n = count_arcs(&m, (0, &[0.75, 0.5]), (0, &[0.25, 0.5]), 1.6, 720, &ShootOptions::default()).unwrap();
    assert_eq!(n, 3);
}

#[test]
fn short_horizon_gives_no_arcs() {
    let m = ChartedMetric::round_sphere(1.0).unwrap();
    let (p, q) = ([1.0, 0.5], [1.8, 2.0]);
    let d = m.distance((0, &p), (0, &q)).unwrap();
    assert_eq!(count_arcs(&m, (0, &p), (0, &q), 0.9 * d, 180, &ShootOptions::default()).unwrap(), 0);
    let arcs = shoot_arcs(&m, (0, &p), (0, &q), d + 0.1, 180, &ShootOptions::default()).unwrap();
    assert_eq!(arcs.len(), 1);
    assert!(arcs[0].length <= d + 0.1 && arcs[0].endpoint_error <= 1e-6);
}

#[test]
fn sphere_counts_stabilize_under_refinement() {
    let m = ChartedMetric::round_sphere(1.0).unwrap();
    let (p, q) = ([0.9, 0.3], [2.1, 2.9]);
    let opts = ShootOptions { check_resolution: true, ..ShootOptions::default() };
    let n = count_arcs(&m, (0, &p), (0, &q), 12.0, 360, &opts).unwrap();
    // two arcs per great-circle turn
    let d = m.distance((0, &p), (0, &q)).unwrap();
    let expected = (0..10).filter(|k| d + TAU * *k as f64 <= 12.0).count() + (1..10).filter(|k| TAU * *k as f64 - d <= 12.0).count();
    assert_eq!(n, expected);
}

#[test]
fn hyperbolic_orbit_count_matches_brute_force() {
    let m = ChartedMetric::genus2_octagon();
    let deck = DeckGroup::genus2_octagon();
    let p = Complex64::new(0.1, 0.05);
    let q = Complex64::new(-0.2, 0.25);
    let t = 3.0;
    let brute = deck
        .elements_within(t + 2.0 * deck.circumradius())
        .iter()
        .map(|g| disk_distance(p, g.apply(q)))
        .chain(std::iter::once(disk_distance(p, q)))
        .filter(|d| *d <= t)
        .count();
    assert_eq!(orbit_count(&deck, p, q, t), brute);
    let n = count_arcs(&m, (0, &[p.re, p.im]), (0, &[q.re, q.im]), t, 1, &ShootOptions::default()).unwrap();
    assert_eq!(n, brute);
}

#[test]
fn metric_specs_parse() {
    assert!(matches!("sphere:r=2".parse::<ChartedMetric>().unwrap().tag(), CatalogTag::RoundSphere { radius } if radius == 2.0));
    assert!(matches!("torus:1,2".parse::<ChartedMetric>().unwrap().tag(), CatalogTag::FlatTorus { .. }));
    assert!("hyperbolic:genus2-octagon".parse::<ChartedMetric>().is_ok());
    assert_eq!("product:(sphere:r=1)x(torus:1,1)".parse::<ChartedMetric>().unwrap().dim(), 4);
    assert!("klein:1".parse::<ChartedMetric>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sectional_is_basis_invariant(
        th in 0.3f64..2.8, ph in 0.1f64..6.0,
        a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0, d in -2.0f64..2.0,
    ) {
        prop_assume!((a * d - b * c).abs() > 0.1);
        let m = ChartedMetric::product(ChartedMetric::round_sphere(1.0).unwrap(), ChartedMetric::round_sphere(2.0).unwrap());
        let x = [th, ph, 1.0, 2.0];
        let u = [1.0, 0.2, 0.5, -0.3];
        let v = [0.1, 1.0, -0.4, 0.7];
        let r = riemann(&m, 0, &x).unwrap();
        let k0 = r.sectional(&u, &v).unwrap();
        let u2: Vec<f64> = (0..4).map(|i| a * u[i] + b * v[i]).collect();
        let v2: Vec<f64> = (0..4).map(|i| c * u[i] + d * v[i]).collect();
        let k1 = r.sectional(&u2, &v2).unwrap();
        prop_assert!((k1 - k0).abs() <= 1e-9 * k0.abs().max(1.0));
    }

    #[test]
    fn volume_scales(c in 0.5f64..2.0) {
        let spec = QuadratureSpec::default();
        let m = ChartedMetric::product(ChartedMetric::round_sphere(1.0).unwrap(), ChartedMetric::flat_torus(vec![1.0, 2.0]).unwrap());
        let v = volume(&m, &spec).unwrap();
        let vc = volume(&m.scaled(c).unwrap(), &spec).unwrap();
        prop_assert!((vc / (c * c * v) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn counts_are_monotone_in_t(px in 0.0f64..1.0, py in 0.0f64..1.0, qx in 0.0f64..1.0, qy in 0.0f64..1.0) {
        let m = ChartedMetric::flat_torus(vec![1.0, 1.0]).unwrap();
        prop_assume!((px - qx).hypot(py - qy) > 0.05);
        let opts = ShootOptions::default();
        let a = count_arcs(&m, (0, &[px, py]), (0, &[qx, qy]), 2.0, 360, &opts).unwrap();
        let b = count_arcs(&m, (0, &[px, py]), (0, &[qx, qy]), 3.0, 360, &opts).unwrap();
        prop_assert!(a <= b);
        prop_assert_eq!(b, lattice_oracle([qx - px, qy - py], [1.0, 1.0], 3.0));
    }
}
