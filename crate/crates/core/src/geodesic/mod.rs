//! Geodesic integration and two-point arc enumeration.

mod orbit;
mod shoot;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{ChartedMetric, GeometryError};

pub use orbit::{orbit_count, orbit_lengths};
pub use shoot::{arc_lengths, count_arcs, shoot_arcs, write_arcs_csv, GeodesicArc, ShootOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeodesicError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("integration step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("length bound must be positive, got {0}")]
    InvalidLength(f64),
    #[error("endpoints coincide (distance {0:e})")]
    CoincidentEndpoints(f64),
    #[error("endpoints are conjugate along every geodesic (distance {0})")]
    ConjugateEndpoints(f64),
    #[error("arc count did not stabilize under refinement: {coarse} at resolution {resolution}, {refined} at twice that")]
    ResolutionTooCoarse { resolution: usize, coarse: usize, refined: usize },
    #[error("arc shooting needs a surface, got dimension {0}")]
    UnsupportedDimension(usize),
}

/// A point with a tangent vector, in coordinates of chart `chart`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicState {
    pub chart: usize,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

impl GeodesicState {
    pub fn new(chart: usize, x: Vec<f64>, v: Vec<f64>) -> Self {
        Self { chart, x, v }
    }

    pub fn speed(&self, metric: &ChartedMetric) -> Result<f64, GeometryError> {
        let g = metric.tensor(self.chart, &self.x)?;
        let v = nalgebra::DVector::from_column_slice(&self.v);
        Ok(v.dot(&(&g * &v)).max(0.0).sqrt())
    }
}

/// Classical RK4 on `x'' = -Γ(x', x')`, re-charting after every step
/// (torus wrap, deck reduction, sphere chart switch).
pub fn integrate(
    metric: &ChartedMetric,
    state: &GeodesicState,
    t: f64,
    step: f64,
) -> Result<GeodesicState, GeodesicError> {
    let mut ray = Ray::start(metric, state)?;
    ray.advance(t, step)?;
    Ok(ray.state())
}

/// Integrator state that also tracks the lattice translation accumulated
/// by torus wrapping, so that positions can be read in the universal cover.
#[derive(Clone, Debug)]
pub(crate) struct Ray<'a> {
    metric: &'a ChartedMetric,
    pub chart: usize,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub unwrap: Vec<f64>,
    scratch: Scratch,
}

#[derive(Clone, Debug, Default)]
struct Scratch {
    xs: Vec<f64>,
    vs: Vec<f64>,
    kx: [Vec<f64>; 4],
    kv: [Vec<f64>; 4],
}

impl<'a> Ray<'a> {
    pub fn start(metric: &'a ChartedMetric, state: &GeodesicState) -> Result<Self, GeodesicError> {
        let n = metric.dim();
        if state.x.len() != n || state.v.len() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, got: state.x.len() }.into());
        }
        if !metric.in_chart(state.chart, &state.x) {
            return Err(GeometryError::PointOutsideChart { chart: state.chart, point: state.x.clone() }.into());
        }
        let c = metric.canonicalize(state.chart, &state.x, &state.v)?;
        let unwrap = c.shift.unwrap_or_else(|| vec![0.0; n]);
        let zero = vec![0.0; n];
        Ok(Self {
            metric,
            chart: c.chart,
            x: c.x,
            v: c.v,
            unwrap,
            scratch: Scratch {
                xs: zero.clone(),
                vs: zero.clone(),
                kx: [zero.clone(), zero.clone(), zero.clone(), zero.clone()],
                kv: [zero.clone(), zero.clone(), zero.clone(), zero],
            },
        })
    }

    pub fn state(&self) -> GeodesicState {
        GeodesicState { chart: self.chart, x: self.x.clone(), v: self.v.clone() }
    }

    /// Position in the universal cover of a flat torus (chart coordinates otherwise).
    pub fn unwrapped(&self) -> Vec<f64> {
        self.x.iter().zip(&self.unwrap).map(|(a, b)| a + b).collect()
    }

    /// Integrates for time `t` with equal steps no larger than `step`.
    pub fn advance(&mut self, t: f64, step: f64) -> Result<(), GeodesicError> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(GeodesicError::InvalidStep(step));
        }
        if t <= 0.0 {
            return Ok(());
        }
        if self.metric.is_flat() {
            for i in 0..self.x.len() {
                self.x[i] += t * self.v[i];
            }
            return self.recharter();
        }
        let steps = (t / step).ceil().max(1.0) as usize;
        let h = t / steps as f64;
        for _ in 0..steps {
            self.rk4(h)?;
            self.recharter()?;
        }
        Ok(())
    }

    fn recharter(&mut self) -> Result<(), GeodesicError> {
        let c = self.metric.canonicalize(self.chart, &self.x, &self.v)?;
        if let Some(s) = c.shift {
            for (u, d) in self.unwrap.iter_mut().zip(s) {
                *u += d;
            }
        }
        self.chart = c.chart;
        self.x = c.x;
        self.v = c.v;
        Ok(())
    }

    fn rk4(&mut self, h: f64) -> Result<(), GeodesicError> {
        let n = self.x.len();
        let m = self.metric;
        let chart = self.chart;
        let s = &mut self.scratch;
        let coeff = [0.0, 0.5, 0.5, 1.0];
        for stage in 0..4 {
            if stage == 0 {
                s.xs.copy_from_slice(&self.x);
                s.vs.copy_from_slice(&self.v);
            } else {
                let c = coeff[stage] * h;
                for i in 0..n {
                    s.xs[i] = self.x[i] + c * s.kx[stage - 1][i];
                    s.vs[i] = self.v[i] + c * s.kv[stage - 1][i];
                }
            }
            if !m.in_chart(chart, &s.xs) {
                return Err(GeometryError::LeftAtlas { point: s.xs.clone() }.into());
            }
            s.kx[stage].copy_from_slice(&s.vs);
            m.geodesic_accel(chart, &s.xs, &s.vs, &mut s.kv[stage])?;
        }
        for i in 0..n {
            self.x[i] += h / 6.0 * (s.kx[0][i] + 2.0 * s.kx[1][i] + 2.0 * s.kx[2][i] + s.kx[3][i]);
            self.v[i] += h / 6.0 * (s.kv[0][i] + 2.0 * s.kv[1][i] + 2.0 * s.kv[2][i] + s.kv[3][i]);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn torus_axis_geodesic_wraps() {
        let m = ChartedMetric::flat_torus(vec![2.0, 3.0]).unwrap();
        let s = GeodesicState::new(0, vec![0.3, 0.4], vec![1.0, 0.0]);
        let e = integrate(&m, &s, 2.0, 1e-3).unwrap();
        assert!((e.x[0] - 0.3).abs() < 1e-12 && (e.x[1] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn great_circles_close() {
        let m = ChartedMetric::round_sphere(1.0).unwrap();
        let s = GeodesicState::new(0, vec![1.0, 0.5], vec![0.6, 0.8 / 1f64.sin()]);
        let e = integrate(&m, &s, TAU, 1e-3).unwrap();
        let a = m.ambient_position(s.chart, &s.x);
        let b = m.ambient_position(e.chart, &e.x);
        let d: f64 = a.iter().zip(&b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
        assert!(d < 1e-5, "{d}");
        assert!((e.speed(&m).unwrap() - 1.0).abs() < 1e-6 * TAU);
    }

    #[test]
    fn half_plane_vertical_geodesic() {
        let m = ChartedMetric::half_plane();
        let s = GeodesicState::new(0, vec![0.0, 1.0], vec![0.0, 1.0]);
        let e = integrate(&m, &s, 1.0, 1e-3).unwrap();
        assert!((e.x[1] - 1f64.exp()).abs() < 1e-6);
    }

    #[test]
    fn hyperbolic_speed_conserved_across_reductions() {
        let m = ChartedMetric::genus2_octagon();
        let s = GeodesicState::new(0, vec![0.1, 0.2], vec![0.3, 0.1]);
        let v0 = s.speed(&m).unwrap();
        let e = integrate(&m, &s, 10.0, 1e-2).unwrap();
        let v1 = e.speed(&m).unwrap();
        assert!(((v1 - v0) / v0).abs() < 1e-6 * 10.0, "{v0} {v1}");
        assert!(m.deck().unwrap().contains(num_complex::Complex64::new(e.x[0], e.x[1])));
        let _ = PI;
    }

    #[test]
    fn custom_metric_leaving_chart_is_reported() {
        let m = ChartedMetric::half_plane();
        let s = GeodesicState::new(0, vec![0.0, 1.0], vec![0.0, -1.0]);
        // e^{-t} never reaches y = 0, but a huge step overshoots the chart
        let e = integrate(&m, &s, 5.0, 5.0);
        assert!(matches!(e, Err(GeodesicError::Geometry(GeometryError::LeftAtlas { .. }))));
    }
}
