//! Benchmark fixtures shared by the criterion targets.

use minent_core::ChartedMetric;

pub fn flat_torus() -> ChartedMetric {
    ChartedMetric::flat_torus(vec![1.0, 1.0]).expect("valid sides")
}

pub fn round_sphere() -> ChartedMetric {
    ChartedMetric::round_sphere(1.0).expect("valid radius")
}

pub fn genus2() -> ChartedMetric {
    ChartedMetric::genus2_octagon()
}

/// Endpoint pairs `(p, q)` in chart-0 coordinates of the fixtures.
pub const TORUS_PAIR: ([f64; 2], [f64; 2]) = ([0.1, 0.2], [0.35, 0.8]);
pub const SPHERE_PAIR: ([f64; 2], [f64; 2]) = ([1.0, 0.5], [2.0, 2.5]);
pub const GENUS2_PAIR: ([f64; 2], [f64; 2]) = ([0.1, 0.05], [-0.2, 0.3]);
