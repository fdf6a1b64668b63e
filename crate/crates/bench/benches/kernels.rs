use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use minent_bench::{flat_torus, genus2, round_sphere, GENUS2_PAIR, SPHERE_PAIR, TORUS_PAIR};
use minent_core::classify::theorem_e_decision;
use minent_core::collapse::{
    lemma61_projection_bound, quotient_tensor, random_lemma61_instance, volume_sweep, CollapseFamily,
};
use minent_core::ellipticity::tor_betti_sequence;
use minent_core::geodesic::{count_arcs, integrate, ShootOptions};
use minent_core::geom::{christoffel, curvature_bounds};
use minent_core::{AbelianGroup, BardenIndex, ChartedMetric, GeodesicState, QuadratureSpec, SampleGrid};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn geometry(c: &mut Criterion) {
    let sphere = round_sphere();
    c.bench_function("christoffel/sphere", |b| b.iter(|| christoffel(&sphere, 0, black_box(&[1.0, 0.5])).unwrap()));
    c.bench_function("curvature_bounds/sphere", |b| {
        b.iter(|| curvature_bounds(&sphere, &SampleGrid::uniform(black_box(5))).unwrap())
    });
    let hp = ChartedMetric::half_plane();
    let start = GeodesicState::new(0, vec![0.0, 1.0], vec![0.0, 1.0]);
    c.bench_function("rk4/half_plane_T2", |b| b.iter(|| integrate(&hp, black_box(&start), 2.0, 0.01).unwrap()));
}

fn arcs(c: &mut Criterion) {
    let torus = flat_torus();
    let (p, q) = TORUS_PAIR;
    let opts = ShootOptions::default();
    c.bench_function("count_arcs/torus_T5", |b| b.iter(|| count_arcs(&torus, (0, &p), (0, &q), black_box(5.0), 720, &opts).unwrap()));
    let sphere = round_sphere();
    let (p, q) = SPHERE_PAIR;
    c.bench_function("count_arcs/sphere_T10", |b| b.iter(|| count_arcs(&sphere, (0, &p), (0, &q), black_box(10.0), 720, &opts).unwrap()));
    let hyp = genus2();
    let (p, q) = GENUS2_PAIR;
    c.bench_function("count_arcs/genus2_T8", |b| b.iter(|| count_arcs(&hyp, (0, &p), (0, &q), black_box(8.0), 720, &opts).unwrap()));
}

fn collapse(c: &mut Criterion) {
    let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.5, 0.2, 0.1, 0.2, 1.0]);
    let v = [0.4, -1.0, 0.7];
    c.bench_function("quotient_tensor/3d", |b| b.iter(|| quotient_tensor(&g, black_box(&v), 1e-3)));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (f, h1, h2) = random_lemma61_instance(&mut rng, 5);
    c.bench_function("lemma61_projection/l5", |b| b.iter(|| lemma61_projection_bound(black_box(&f), &h1, &h2).unwrap()));
    let family = CollapseFamily::round_sphere(vec![1e-2]).unwrap();
    let mut group = c.benchmark_group("volume_sweep");
    group.sample_size(10);
    group.bench_function("sphere_delta1e-2", |b| b.iter(|| volume_sweep(&family, black_box(&[1e-2]), &QuadratureSpec::default()).unwrap()));
    group.finish();
}

fn classify(c: &mut Criterion) {
    c.bench_function("tor_betti/a2_n200", |b| b.iter(|| tor_betti_sequence(black_box(2), 200)));
    let g: AbelianGroup = "Z^2+Z4+Z4+Z9+Z9".parse().unwrap();
    c.bench_function("theorem_e/composite", |b| b.iter(|| theorem_e_decision(black_box(&g), BardenIndex::Finite(1))));
}

criterion_group!(benches, geometry, arcs, collapse, classify);
criterion_main!(benches);
