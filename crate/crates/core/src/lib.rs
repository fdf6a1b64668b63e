//! Geodesic-flow entropy estimation, S¹-collapse metric families and
//! ellipticity decisions for simply connected 4- and 5-manifolds.

pub mod classify;
pub mod collapse;
pub mod ellipticity;
pub mod entropy;
pub mod geodesic;
pub mod geom;

pub use geodesic::{GeodesicArc, GeodesicState};
pub use geom::{ChartedMetric, CurvatureReport, GeometryError, QuadratureSpec, SampleGrid};
pub use classify::{AbelianGroup, BardenIndex, FourManifoldWord, Generator, IntersectionForm};
