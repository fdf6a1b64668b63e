//! Chart-based Riemannian metrics, curvature and volume.

mod curvature;
pub mod deck;
mod metric;
mod parse;
pub mod quadrature;
mod volume;

use thiserror::Error;

pub use curvature::{
    christoffel, christoffel_with, curvature_bounds, riemann, sectional_curvature, Christoffel, CurvatureReport,
    Differentiation, Riemann, SampleGrid,
};
pub use deck::{DeckGroup, Mobius};
pub use metric::{CatalogTag, ChartedMetric, CustomChart, PartialsFn, TensorFn};
pub use quadrature::{GaussLegendre, QuadratureSpec};
pub use volume::{integrate_density, volume};

#[allow(unused_imports)]
pub(crate) use metric::{interior_grid, sphere_chart, sphere_embed};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid metric spec: {0}")]
    InvalidSpec(String),
    #[error("expected a point of dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("chart {0} does not exist")]
    NoSuchChart(usize),
    #[error("point {point:?} lies outside chart {chart}")]
    PointOutsideChart { chart: usize, point: Vec<f64> },
    #[error("metric is singular at {point:?}")]
    SingularMetric { point: Vec<f64> },
    #[error("metric is not symmetric at {point:?}")]
    NotSymmetric { point: Vec<f64> },
    #[error("metric is not positive definite at {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },
    #[error("tangent vectors do not span a plane")]
    DegeneratePlane,
    #[error("sample grid is empty")]
    EmptyGrid,
    #[error("quadrature too coarse: {coarse} vs {refined} after refinement")]
    QuadratureTooCoarse { coarse: f64, refined: f64 },
    #[error("trajectory left every chart at {point:?}")]
    LeftAtlas { point: Vec<f64> },
    #[error("unsupported: {0}")]
    Unsupported(String),
}
