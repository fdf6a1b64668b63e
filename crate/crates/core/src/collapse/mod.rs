//! Collapse of metrics with a circle action: invariant averaging, the quotient
//! family `g_δ` of `(M × S¹, g + δ dt²)`, volume and curvature sweeps, and the
//! linear-algebra facts behind multi-step collapse.

mod action;
mod lemma61;

use std::f64::consts::TAU;
use std::io::Write;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{
    curvature_bounds, integrate_density, interior_grid, volume, ChartedMetric, CurvatureReport, CustomChart,
    GeometryError, QuadratureSpec, SampleGrid,
};

pub use action::{CircleAction, FixedDistanceFn, FlowFn, GeneratorFn};
pub use lemma61::{
    lemma61_projection_bound, lemma61_quotient_volume, lemma61_sweep, random_lemma61_instance, Lemma61Summary, ProjectionBound,
    QuotientVolume,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CollapseError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("orbit integration failed: {0}")]
    OrbitIntegration(String),
    #[error("generator is not 2π-periodic (return error {residual})")]
    NotPeriodic { residual: f64 },
    #[error("base metric is not invariant (residual {residual})")]
    NonInvariantBase { residual: f64 },
    #[error("grid point {point:?} is within {distance} < {rho} of the fixed set")]
    GridTouchesFixedSet { point: Vec<f64>, distance: f64, rho: f64 },
    #[error("hypothesis violated: ‖B‖ = {norm} > 1")]
    HypothesisViolated { norm: f64 },
}

/// Largest relative invariance residual accepted for a base metric.
pub const INVARIANCE_TOLERANCE: f64 = 1e-4;
/// Default `ρ` of the two-region volume argument.
pub const DEFAULT_RHO: f64 = 0.1;
const RESIDUAL_ANGLES: usize = 7;

/// Orbit average `ḡ = (1/2π) ∫ φ_θ^* g dθ` by the periodic trapezoid rule
/// with `nodes` nodes. The result is a one-chart metric on the action's domain.
pub fn average_metric(metric: &ChartedMetric, action: &CircleAction, nodes: usize) -> Result<ChartedMetric, CollapseError> {
    if nodes == 0 {
        return Err(CollapseError::InvalidInput("averaging needs at least one node".into()));
    }
    if metric.dim() != action.dim() {
        return Err(GeometryError::DimensionMismatch { expected: metric.dim(), got: action.dim() }.into());
    }
    let (lo, hi) = action.domain();
    for x in interior_grid(lo, hi, 3, 0.1) {
        average_at(metric, action, nodes, &x)?;
    }
    let base = metric.clone();
    let act = action.clone();
    let n = metric.dim();
    let tensor = Arc::new(move |x: &[f64]| {
        average_at(&base, &act, nodes, x).unwrap_or_else(|_| DMatrix::from_element(n, n, f64::NAN))
    });
    let (clo, chi) = action.chart_box();
    Ok(ChartedMetric::custom(n, vec![CustomChart::new(clo, chi, tensor).with_region(lo.to_vec(), hi.to_vec())])?)
}

fn average_at(metric: &ChartedMetric, action: &CircleAction, nodes: usize, x: &[f64]) -> Result<DMatrix<f64>, CollapseError> {
    let n = metric.dim();
    let mut acc = DMatrix::zeros(n, n);
    for k in 0..nodes {
        let (y, j) = action.flow(x, TAU * k as f64 / nodes as f64)?;
        let g = metric
            .tensor(action.chart(), &y)
            .map_err(|e| CollapseError::OrbitIntegration(format!("orbit of {x:?} left the chart: {e}")))?;
        acc += j.transpose() * g * j;
    }
    Ok(acc / nodes as f64)
}

/// Largest relative change `‖φ_θ^* g - g‖ / ‖g‖` over the points and
/// `angles` interior angles.
pub fn invariance_residual(
    metric: &ChartedMetric,
    action: &CircleAction,
    points: &[Vec<f64>],
    angles: usize,
) -> Result<f64, CollapseError> {
    let mut worst: f64 = 0.0;
    for x in points {
        let g = metric.tensor(action.chart(), x)?;
        for k in 0..angles {
            let (y, j) = action.flow(x, TAU * (k as f64 + 0.5) / angles as f64)?;
            let pulled = j.transpose() * metric.tensor(action.chart(), &y)? * j;
            worst = worst.max((pulled - &g).norm() / g.norm());
        }
    }
    Ok(worst)
}

/// `g_δ = g - (g v)(g v)^T / (δ + ε)` with `ε = g(v, v)`.
pub fn quotient_tensor(g: &DMatrix<f64>, v: &[f64], delta: f64) -> DMatrix<f64> {
    let v = nalgebra::DVector::from_column_slice(v);
    let gv = g * &v;
    let eps = v.dot(&gv);
    g - &gv * gv.transpose() / (delta + eps)
}

/// The quotient metric `g_δ` at `x`: equal to `g` on the `g`-orthogonal
/// complement of `v_x`, with `g_δ(v_x, v_x) = δ/(δ + ε_x) g(v_x, v_x)`.
pub fn quotient_metric_at(
    g: &ChartedMetric,
    action: &CircleAction,
    delta: f64,
    x: &[f64],
) -> Result<DMatrix<f64>, CollapseError> {
    check_delta(delta)?;
    let residual = invariance_residual(g, action, &[x.to_vec()], RESIDUAL_ANGLES)?;
    if residual > INVARIANCE_TOLERANCE {
        return Err(CollapseError::NonInvariantBase { residual });
    }
    Ok(quotient_tensor(&g.tensor(action.chart(), x)?, &action.generator(x), delta))
}

fn check_delta(delta: f64) -> Result<(), CollapseError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(CollapseError::InvalidInput(format!("δ must be positive, got {delta}")));
    }
    Ok(())
}

/// An invariant base metric, its action and the δ values of interest.
#[derive(Clone, Debug)]
pub struct CollapseFamily {
    base: ChartedMetric,
    action: CircleAction,
    pub deltas: Vec<f64>,
}

impl CollapseFamily {
    /// Checks invariance of `base` on a grid of the action's domain.
    pub fn new(base: ChartedMetric, action: CircleAction, deltas: Vec<f64>) -> Result<Self, CollapseError> {
        if base.dim() != action.dim() {
            return Err(GeometryError::DimensionMismatch { expected: base.dim(), got: action.dim() }.into());
        }
        for d in &deltas {
            check_delta(*d)?;
        }
        let (lo, hi) = action.domain();
        let residual = invariance_residual(&base, &action, &interior_grid(lo, hi, 5, 0.05), RESIDUAL_ANGLES)?;
        if residual > INVARIANCE_TOLERANCE {
            return Err(CollapseError::NonInvariantBase { residual });
        }
        Ok(Self { base, action, deltas })
    }

    /// Unit round sphere with the rotation about its polar axis.
    pub fn round_sphere(deltas: Vec<f64>) -> Result<Self, CollapseError> {
        Self::new(ChartedMetric::round_sphere(1.0)?, CircleAction::sphere_rotation(), deltas)
    }

    pub fn base(&self) -> &ChartedMetric {
        &self.base
    }

    pub fn action(&self) -> &CircleAction {
        &self.action
    }

    /// `ε_x = g(v_x, v_x)`.
    pub fn epsilon(&self, x: &[f64]) -> Result<f64, CollapseError> {
        let g = self.base.tensor(self.action.chart(), x)?;
        let v = nalgebra::DVector::from_vec(self.action.generator(x));
        Ok(v.dot(&(g * &v)))
    }

    pub fn tensor(&self, delta: f64, x: &[f64]) -> Result<DMatrix<f64>, CollapseError> {
        check_delta(delta)?;
        Ok(quotient_tensor(&self.base.tensor(self.action.chart(), x)?, &self.action.generator(x), delta))
    }

    /// `g_δ` as a one-chart metric on the action's domain, with derivatives
    /// from the product rule.
    pub fn metric(&self, delta: f64) -> Result<ChartedMetric, CollapseError> {
        check_delta(delta)?;
        let n = self.base.dim();
        let (lo, hi) = self.action.domain();
        let (b1, a1) = (self.base.clone(), self.action.clone());
        let chart = a1.chart();
        let tensor = Arc::new(move |x: &[f64]| match b1.tensor(chart, x) {
            Ok(g) => quotient_tensor(&g, &a1.generator(x), delta),
            Err(_) => DMatrix::from_element(n, n, f64::NAN),
        });
        let (b2, a2) = (self.base.clone(), self.action.clone());
        let partials = Arc::new(move |x: &[f64]| {
            quotient_partials(&b2, &a2, delta, x).unwrap_or_else(|_| vec![DMatrix::from_element(n, n, f64::NAN); n])
        });
        let (clo, chi) = self.action.chart_box();
        let chart = CustomChart::new(clo, chi, tensor).with_partials(partials).with_region(lo.to_vec(), hi.to_vec());
        Ok(ChartedMetric::custom(n, vec![chart])?)
    }

    /// Grid of the action's domain restricted to distance `>= rho` from the
    /// fixed set.
    pub fn avoiding_grid(&self, per_axis: usize, rho: f64) -> Vec<Vec<f64>> {
        let (lo, hi) = self.action.domain();
        interior_grid(lo, hi, per_axis, 0.0)
            .into_iter()
            .filter(|x| self.action.fixed_distance(x) >= rho)
            .collect()
    }
}

fn quotient_partials(
    base: &ChartedMetric,
    action: &CircleAction,
    delta: f64,
    x: &[f64],
) -> Result<Vec<DMatrix<f64>>, CollapseError> {
    let chart = action.chart();
    let g = base.tensor(chart, x)?;
    let dg = base.partials(chart, x)?;
    let v = nalgebra::DVector::from_vec(action.generator(x));
    let dv = action.generator_jacobian(x);
    let a = &g * &v;
    let s = delta + v.dot(&a);
    let mut out = Vec::with_capacity(x.len());
    for (k, dgk) in dg.iter().enumerate() {
        let dvk = dv.column(k).into_owned();
        let da = dgk * &v + &g * &dvk;
        let ds = v.dot(&(dgk * &v)) + 2.0 * v.dot(&(&g * &dvk));
        let outer = &da * a.transpose() + &a * da.transpose();
        out.push(dgk - outer / s + &a * a.transpose() * (ds / (s * s)));
    }
    Ok(out)
}

/// `(δ, Vol(g_δ))` from the density `sqrt(δ / (δ + ε))` against `dvol(g)`.
/// Panels are doubled (up to 32 times the given count) until the
/// refinement check passes.
pub fn volume_sweep(family: &CollapseFamily, deltas: &[f64], spec: &QuadratureSpec) -> Result<Vec<(f64, f64)>, CollapseError> {
    let mut out = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        check_delta(delta)?;
        let weight = |chart: usize, x: &[f64], sqrt_det: f64| -> Result<f64, GeometryError> {
            if chart != family.action.chart() {
                return Err(GeometryError::Unsupported("volume sweep outside the action's chart".into()));
            }
            let eps = family.epsilon(x).map_err(|e| GeometryError::Unsupported(e.to_string()))?;
            Ok(sqrt_det * (delta / (delta + eps)).sqrt())
        };
        let mut s = *spec;
        let vol = loop {
            match integrate_density(&family.base, &s, weight) {
                Err(GeometryError::QuadratureTooCoarse { .. }) if s.panels < 32 * spec.panels => s = s.refined(),
                other => break other?,
            }
        };
        out.push((delta, vol));
    }
    Ok(out)
}

/// Curvature of `g_δ` on points of the action's domain, each at distance
/// `>= rho` from the fixed set.
pub fn curvature_sweep(
    family: &CollapseFamily,
    grid: &[Vec<f64>],
    rho: f64,
    deltas: &[f64],
) -> Result<Vec<(f64, CurvatureReport)>, CollapseError> {
    for x in grid {
        let distance = family.action.fixed_distance(x);
        if distance < rho || family.action.is_fixed(x) {
            return Err(CollapseError::GridTouchesFixedSet { point: x.clone(), distance, rho });
        }
    }
    let sample = SampleGrid::points(grid.iter().map(|x| (0, x.clone())).collect());
    let mut out = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        out.push((delta, curvature_bounds(&family.metric(delta)?, &sample)?));
    }
    Ok(out)
}

/// The two-region estimate `Vol(g_δ) <= Vol_g(N) + sqrt(δ / (δ + η)) Vol(g)`,
/// with `N = {ε < η}` and `η` the largest power of two for which
/// `Vol_g(N) < ρ/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoRegion {
    pub delta: f64,
    pub rho: f64,
    pub eta: f64,
    /// Indicator integral plus its change under panel doubling.
    pub near_volume: f64,
    pub far_bound: f64,
    pub bound: f64,
}

/// Quadrature for the indicator integrals of [`two_region_bounds`].
pub const INDICATOR_QUADRATURE: QuadratureSpec = QuadratureSpec { order: 4, panels: 64, tolerance: f64::INFINITY };

pub fn two_region_bounds(family: &CollapseFamily, deltas: &[f64], rho: f64) -> Result<Vec<TwoRegion>, CollapseError> {
    for d in deltas {
        check_delta(*d)?;
    }
    if !(rho > 0.0) {
        return Err(CollapseError::InvalidInput(format!("ρ must be positive, got {rho}")));
    }
    let total = volume(&family.base, &QuadratureSpec::default())?;
    let near = |eta: f64, spec: &QuadratureSpec| {
        integrate_density(&family.base, spec, |_, x, sd| {
            let eps = family.epsilon(x).map_err(|e| GeometryError::Unsupported(e.to_string()))?;
            Ok(if eps < eta { sd } else { 0.0 })
        })
    };
    let mut eta: f64 = 1.0;
    for _ in 0..200 {
        let coarse = near(eta, &INDICATOR_QUADRATURE)?;
        let fine = near(eta, &INDICATOR_QUADRATURE.refined())?;
        let near_volume = fine + (fine - coarse).abs();
        if near_volume < rho / 2.0 {
            return Ok(deltas
                .iter()
                .map(|&delta| {
                    let far_bound = (delta / (delta + eta)).sqrt() * total;
                    TwoRegion { delta, rho, eta, near_volume, far_bound, bound: near_volume + far_bound }
                })
                .collect());
        }
        eta /= 2.0;
    }
    Err(CollapseError::InvalidInput("fixed set has positive volume".into()))
}

/// One row of a collapse sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub volume: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub ricci_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub action: String,
    pub rho: f64,
    pub base_volume: f64,
    pub rows: Vec<SweepRow>,
    /// Volume nondecreasing in δ.
    pub volume_monotone: bool,
    /// Every `Vol(g_δ) <= Vol(g)`.
    pub volume_bounded: bool,
    /// Largest `k_bound` over the sweep.
    pub k_bound_sup: f64,
    pub curvature_finite: bool,
}

/// Volume and curvature of `g_δ` for each δ (sorted ascending), with the
/// curvature restricted to the `rho`-avoiding grid.
pub fn sweep(
    family: &CollapseFamily,
    deltas: &[f64],
    grid: &[Vec<f64>],
    rho: f64,
    spec: &QuadratureSpec,
) -> Result<SweepSummary, CollapseError> {
    let mut ds = deltas.to_vec();
    ds.sort_by(f64::total_cmp);
    let vols = volume_sweep(family, &ds, spec)?;
    let curv = curvature_sweep(family, grid, rho, &ds)?;
    let base_volume = volume(&family.base, spec)?;
    let rows: Vec<SweepRow> = vols
        .iter()
        .zip(&curv)
        .map(|((d, v), (_, c))| SweepRow { delta: *d, volume: *v, k_min: c.k_min, k_max: c.k_max, ricci_min: c.ricci_min })
        .collect();
    let slack = 1e-9 * base_volume;
    Ok(SweepSummary {
        action: family.action.label().to_string(),
        rho,
        base_volume,
        volume_monotone: rows.windows(2).all(|w| w[1].volume >= w[0].volume - slack),
        volume_bounded: rows.iter().all(|r| r.volume <= base_volume + slack),
        k_bound_sup: curv.iter().map(|(_, c)| c.k_bound).fold(0.0, f64::max),
        curvature_finite: curv.iter().all(|(_, c)| c.k_min.is_finite() && c.k_max.is_finite()),
        rows,
    })
}

/// CSV with header `delta,volume,k_min,k_max,ricci_min`.
pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
