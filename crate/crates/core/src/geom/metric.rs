use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::deck::DeckGroup;
use super::GeometryError;

/// Metric components `g_ij(x)` on a chart.
pub type TensorFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
/// Partial derivatives `[d_k g_ij(x)]_k` on a chart.
pub type PartialsFn = Arc<dyn Fn(&[f64]) -> Vec<DMatrix<f64>> + Send + Sync>;

/// A user-supplied chart: an open coordinate box with metric components.
#[derive(Clone)]
pub struct CustomChart {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    tensor: TensorFn,
    partials: Option<PartialsFn>,
    region: Option<(Vec<f64>, Vec<f64>)>,
}

impl CustomChart {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, tensor: TensorFn) -> Self {
        Self { lower, upper, tensor, partials: None, region: None }
    }

    /// Box used for volume, sampling and grids when it differs from the
    /// coordinate box (e.g. one period of a wider periodic chart).
    pub fn with_region(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        self.region = Some((lower, upper));
        self
    }

    pub fn fundamental(&self) -> (&[f64], &[f64]) {
        match &self.region {
            Some((lo, hi)) => (lo, hi),
            None => (&self.lower, &self.upper),
        }
    }

    pub fn with_partials(mut self, partials: PartialsFn) -> Self {
        self.partials = Some(partials);
        self
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lower.iter().zip(&self.upper)).all(|(v, (lo, hi))| v > lo && v < hi)
    }
}

impl fmt::Debug for CustomChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomChart")
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("analytic_partials", &self.partials.is_some())
            .finish()
    }
}

/// Which catalog manifold a metric represents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CatalogTag {
    RoundSphere { radius: f64 },
    FlatTorus { sides: Vec<f64> },
    HyperbolicQuotient { curvature: f64, deck: String, generators: usize },
    Product { left: Box<CatalogTag>, right: Box<CatalogTag> },
    Custom,
}

#[derive(Clone, Debug)]
pub(crate) enum Kind {
    /// Two polar charts about the z- and x-axes, both with `r^2 (dtheta^2 + sin^2 theta dphi^2)`.
    Sphere { radius: f64 },
    /// One fundamental box `[0, a_1) x ... x [0, a_n)` with the Euclidean metric.
    Torus { sides: Vec<f64> },
    /// Poincaré disk chart `4 |dz|^2 / (1 - |z|^2)^2` with a deck group.
    Hyperbolic { deck: DeckGroup },
    Product { left: Box<ChartedMetric>, right: Box<ChartedMetric> },
    Custom { dim: usize, charts: Vec<CustomChart> },
}

/// A Riemannian metric given by its components on a finite atlas.
///
/// Metrics are immutable once built; every evaluation is a pure function of
/// the chart index and the coordinates.
#[derive(Clone, Debug)]
pub struct ChartedMetric {
    pub(crate) kind: Kind,
    pub(crate) scale: f64,
}

/// Result of moving a state back into the atlas' preferred coordinates.
#[derive(Clone, Debug)]
pub(crate) struct Canonical {
    pub chart: usize,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    /// Lattice translation subtracted from the coordinates (flat tori only).
    pub shift: Option<Vec<f64>>,
}

/// A region of a chart over which volume quadrature runs.
#[derive(Clone, Debug)]
pub(crate) enum Region {
    Box { chart: usize, lower: Vec<f64>, upper: Vec<f64> },
    /// Star-shaped disk region about the origin of chart 0.
    DeckDomain,
}

const SPHERE_SWITCH: f64 = 0.5;

impl ChartedMetric {
    pub fn round_sphere(radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::InvalidSpec(format!("sphere radius must be positive, got {radius}")));
        }
        Ok(Self { kind: Kind::Sphere { radius }, scale: 1.0 })
    }

    pub fn flat_torus(sides: Vec<f64>) -> Result<Self, GeometryError> {
        if sides.len() < 2 || sides.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(GeometryError::InvalidSpec(format!("torus needs >= 2 positive sides, got {sides:?}")));
        }
        Ok(Self { kind: Kind::Torus { sides }, scale: 1.0 })
    }

    pub fn hyperbolic_quotient(deck: DeckGroup) -> Self {
        Self { kind: Kind::Hyperbolic { deck }, scale: 1.0 }
    }

    /// The genus-2 surface of curvature -1 glued from the regular octagon.
    pub fn genus2_octagon() -> Self {
        Self::hyperbolic_quotient(DeckGroup::genus2_octagon())
    }

    pub fn product(left: ChartedMetric, right: ChartedMetric) -> Self {
        Self { kind: Kind::Product { left: Box::new(left), right: Box::new(right) }, scale: 1.0 }
    }

    pub fn custom(dim: usize, charts: Vec<CustomChart>) -> Result<Self, GeometryError> {
        if dim < 2 || charts.is_empty() {
            return Err(GeometryError::InvalidSpec("custom metric needs dim >= 2 and a chart".into()));
        }
        if charts.iter().any(|c| c.lower.len() != dim || c.upper.len() != dim) {
            return Err(GeometryError::DimensionMismatch { expected: dim, got: charts[0].lower.len() });
        }
        for c in &charts {
            let (lo, hi) = c.fundamental();
            let inside = (0..dim).all(|i| lo.len() == dim && hi.len() == dim && lo[i] >= c.lower[i] && hi[i] <= c.upper[i] && lo[i] < hi[i]);
            if !inside {
                return Err(GeometryError::InvalidSpec("chart region must be a nonempty box inside the chart".into()));
            }
        }
        Ok(Self { kind: Kind::Custom { dim, charts }, scale: 1.0 })
    }

    /// Upper half-plane `(dx^2 + dy^2) / y^2`, as a single custom chart.
    pub fn half_plane() -> Self {
        let tensor: TensorFn = Arc::new(|x: &[f64]| DMatrix::identity(2, 2) / (x[1] * x[1]));
        let partials: PartialsFn = Arc::new(|x: &[f64]| {
            let d = -2.0 / x[1].powi(3);
            vec![DMatrix::zeros(2, 2), DMatrix::identity(2, 2) * d]
        });
        let chart = CustomChart::new(vec![-1e6, 0.0], vec![1e6, 1e6], tensor).with_partials(partials);
        Self::custom(2, vec![chart]).expect("half-plane chart is valid")
    }

    /// The metric `c g`.
    pub fn scaled(&self, c: f64) -> Result<Self, GeometryError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(GeometryError::InvalidSpec(format!("scale must be positive, got {c}")));
        }
        Ok(Self { kind: self.kind.clone(), scale: self.scale * c })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::Sphere { .. } | Kind::Hyperbolic { .. } => 2,
            Kind::Torus { sides } => sides.len(),
            Kind::Product { left, right } => left.dim() + right.dim(),
            Kind::Custom { dim, .. } => *dim,
        }
    }

    pub fn chart_count(&self) -> usize {
        match &self.kind {
            Kind::Sphere { .. } => 2,
            Kind::Torus { .. } | Kind::Hyperbolic { .. } => 1,
            Kind::Product { left, right } => left.chart_count() * right.chart_count(),
            Kind::Custom { charts, .. } => charts.len(),
        }
    }

    pub fn tag(&self) -> CatalogTag {
        let s = self.scale;
        match &self.kind {
            Kind::Sphere { radius } => CatalogTag::RoundSphere { radius: radius * s.sqrt() },
            Kind::Torus { sides } => CatalogTag::FlatTorus { sides: sides.iter().map(|a| a * s.sqrt()).collect() },
            Kind::Hyperbolic { deck } => CatalogTag::HyperbolicQuotient {
                curvature: -1.0 / s,
                deck: deck.label().to_string(),
                generators: deck.generators().len(),
            },
            Kind::Product { left, right } => CatalogTag::Product {
                left: Box::new(left.scaled(s).expect("positive").tag()),
                right: Box::new(right.scaled(s).expect("positive").tag()),
            },
            Kind::Custom { .. } => CatalogTag::Custom,
        }
    }

    pub(crate) fn deck(&self) -> Option<&DeckGroup> {
        match &self.kind {
            Kind::Hyperbolic { deck } => Some(deck),
            _ => None,
        }
    }

    fn split_chart(&self, chart: usize) -> Option<(&ChartedMetric, &ChartedMetric, usize, usize)> {
        match &self.kind {
            Kind::Product { left, right } => {
                let nr = right.chart_count();
                Some((left, right, chart / nr, chart % nr))
            }
            _ => None,
        }
    }

    fn check_chart(&self, chart: usize, x: &[f64]) -> Result<(), GeometryError> {
        if x.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        if chart >= self.chart_count() {
            return Err(GeometryError::NoSuchChart(chart));
        }
        if !self.in_chart(chart, x) {
            return Err(GeometryError::PointOutsideChart { chart, point: x.to_vec() });
        }
        Ok(())
    }

    /// Whether `x` lies in the domain of chart `chart`.
    pub fn in_chart(&self, chart: usize, x: &[f64]) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match &self.kind {
            Kind::Sphere { .. } => x[0] > 0.0 && x[0] < PI,
            Kind::Torus { .. } => true,
            Kind::Hyperbolic { .. } => x[0] * x[0] + x[1] * x[1] < 1.0,
            Kind::Product { .. } => {
                let (l, r, cl, cr) = self.split_chart(chart).expect("product");
                let n1 = l.dim();
                l.in_chart(cl, &x[..n1]) && r.in_chart(cr, &x[n1..])
            }
            Kind::Custom { charts, .. } => charts.get(chart).is_some_and(|c| c.contains(x)),
        }
    }

    /// Metric components at `x` in chart `chart`.
    pub fn tensor(&self, chart: usize, x: &[f64]) -> Result<DMatrix<f64>, GeometryError> {
        self.check_chart(chart, x)?;
        Ok(self.tensor_unchecked(chart, x) * self.scale)
    }

    fn tensor_unchecked(&self, chart: usize, x: &[f64]) -> DMatrix<f64> {
        match &self.kind {
            Kind::Sphere { radius } => {
                let r2 = radius * radius;
                let s = x[0].sin();
                DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![r2, r2 * s * s]))
            }
            Kind::Torus { sides } => DMatrix::identity(sides.len(), sides.len()),
            Kind::Hyperbolic { .. } => {
                let s = 1.0 - x[0] * x[0] - x[1] * x[1];
                DMatrix::identity(2, 2) * (4.0 / (s * s))
            }
            Kind::Product { .. } => {
                let (l, r, cl, cr) = self.split_chart(chart).expect("product");
                let n1 = l.dim();
                let a = l.tensor_unchecked(cl, &x[..n1]) * l.scale;
                let b = r.tensor_unchecked(cr, &x[n1..]) * r.scale;
                block_diag(&a, &b)
            }
            Kind::Custom { charts, .. } => (charts[chart].tensor)(x),
        }
    }

    fn analytic_partials(&self, chart: usize, x: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        match &self.kind {
            Kind::Sphere { radius } => {
                let r2 = radius * radius;
                let mut d0 = DMatrix::zeros(2, 2);
                d0[(1, 1)] = r2 * 2.0 * x[0].sin() * x[0].cos();
                Some(vec![d0, DMatrix::zeros(2, 2)])
            }
            Kind::Torus { sides } => Some(vec![DMatrix::zeros(sides.len(), sides.len()); sides.len()]),
            Kind::Hyperbolic { .. } => {
                let s = 1.0 - x[0] * x[0] - x[1] * x[1];
                let c = 16.0 / (s * s * s);
                Some(vec![DMatrix::identity(2, 2) * (c * x[0]), DMatrix::identity(2, 2) * (c * x[1])])
            }
            Kind::Product { .. } => {
                let (l, r, cl, cr) = self.split_chart(chart).expect("product");
                let n1 = l.dim();
                let n = self.dim();
                let pl = l.analytic_partials(cl, &x[..n1])?;
                let pr = r.analytic_partials(cr, &x[n1..])?;
                let zl = DMatrix::zeros(n1, n1);
                let zr = DMatrix::zeros(n - n1, n - n1);
                let mut out = Vec::with_capacity(n);
                for d in pl {
                    out.push(block_diag(&(d * l.scale), &zr));
                }
                for d in pr {
                    out.push(block_diag(&zl, &(d * r.scale)));
                }
                Some(out)
            }
            Kind::Custom { charts, .. } => charts[chart].partials.as_ref().map(|p| p(x)),
        }
    }

    /// Whether `partials` uses closed-form derivatives at this chart.
    pub fn has_analytic_partials(&self, chart: usize) -> bool {
        match &self.kind {
            Kind::Custom { charts, .. } => charts.get(chart).is_some_and(|c| c.partials.is_some()),
            Kind::Product { .. } => {
                let (l, r, cl, cr) = self.split_chart(chart).expect("product");
                l.has_analytic_partials(cl) && r.has_analytic_partials(cr)
            }
            _ => true,
        }
    }

    /// `[d_k g_ij]_k`, analytic where available, else central differences
    /// with step `1e-5 (1 + |x|)`.
    pub fn partials(&self, chart: usize, x: &[f64]) -> Result<Vec<DMatrix<f64>>, GeometryError> {
        self.check_chart(chart, x)?;
        if let Some(p) = self.analytic_partials(chart, x) {
            return Ok(p.into_iter().map(|d| d * self.scale).collect());
        }
        self.fd_partials(chart, x)
    }

    pub(crate) fn fd_partials(&self, chart: usize, x: &[f64]) -> Result<Vec<DMatrix<f64>>, GeometryError> {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let h = 1e-5 * (1.0 + norm);
        let mut out = Vec::with_capacity(x.len());
        let mut xp = x.to_vec();
        for k in 0..x.len() {
            xp[k] = x[k] + h;
            let gp = self.tensor(chart, &xp)?;
            xp[k] = x[k] - h;
            let gm = self.tensor(chart, &xp)?;
            xp[k] = x[k];
            out.push((gp - gm) / (2.0 * h));
        }
        Ok(out)
    }

    /// Brings `(x, v)` into the preferred chart: wraps torus coordinates,
    /// reduces hyperbolic points into the fundamental region, switches
    /// sphere charts away from the poles.
    pub(crate) fn canonicalize(&self, chart: usize, x: &[f64], v: &[f64]) -> Result<Canonical, GeometryError> {
        match &self.kind {
            Kind::Sphere { .. } => {
                if !(x[0].is_finite() && x[1].is_finite()) {
                    return Err(GeometryError::PointOutsideChart { chart, point: x.to_vec() });
                }
                if x[0].sin() < SPHERE_SWITCH || x[0] <= 0.0 || x[0] >= PI {
                    let (p, dp) = sphere_embed(chart, x, v);
                    let other = 1 - chart;
                    let (y, w) = sphere_chart(other, &p, &dp);
                    return Ok(Canonical { chart: other, x: y, v: w, shift: None });
                }
                let mut y = x.to_vec();
                y[1] = y[1].rem_euclid(TAU);
                Ok(Canonical { chart, x: y, v: v.to_vec(), shift: None })
            }
            Kind::Torus { sides } => {
                let mut y = x.to_vec();
                let mut shift = vec![0.0; sides.len()];
                for i in 0..sides.len() {
                    let w = x[i].rem_euclid(sides[i]);
                    shift[i] = x[i] - w;
                    y[i] = w;
                }
                Ok(Canonical { chart, x: y, v: v.to_vec(), shift: Some(shift) })
            }
            Kind::Hyperbolic { deck } => {
                let z = Complex64::new(x[0], x[1]);
                if z.norm_sqr() >= 1.0 || !z.re.is_finite() || !z.im.is_finite() {
                    return Err(GeometryError::PointOutsideChart { chart, point: x.to_vec() });
                }
                let (w, dv) = deck.reduce(z, Complex64::new(v[0], v[1]));
                Ok(Canonical { chart, x: vec![w.re, w.im], v: vec![dv.re, dv.im], shift: None })
            }
            Kind::Product { .. } => {
                let (l, r, cl, cr) = self.split_chart(chart).expect("product");
                let n1 = l.dim();
                let a = l.canonicalize(cl, &x[..n1], &v[..n1])?;
                let b = r.canonicalize(cr, &x[n1..], &v[n1..])?;
                let shift = match (a.shift, b.shift) {
                    (None, None) => None,
                    (sa, sb) => {
                        let mut s = sa.unwrap_or_else(|| vec![0.0; n1]);
                        s.extend(sb.unwrap_or_else(|| vec![0.0; self.dim() - n1]));
                        Some(s)
                    }
                };
                Ok(Canonical {
                    chart: a.chart * r.chart_count() + b.chart,
                    x: [a.x, b.x].concat(),
                    v: [a.v, b.v].concat(),
                    shift,
                })
            }
            Kind::Custom { charts, .. } => {
                if charts[chart].contains(x) {
                    return Ok(Canonical { chart, x: x.to_vec(), v: v.to_vec(), shift: None });
                }
                match charts.iter().position(|c| c.contains(x)) {
                    Some(c) => Ok(Canonical { chart: c, x: x.to_vec(), v: v.to_vec(), shift: None }),
                    None => Err(GeometryError::LeftAtlas { point: x.to_vec() }),
                }
            }
        }
    }

    /// Position in a fixed ambient space, used to compare points across
    /// charts: R^3 for spheres, coordinates otherwise.
    pub fn ambient_position(&self, chart: usize, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            Kind::Sphere { radius } => {
                let r = radius * self.scale.sqrt();
                let (p, _) = sphere_embed(chart, x, &[0.0, 0.0]);
                p.iter().map(|c| c * r).collect()
            }
            Kind::Product { .. } => {
                let (l, rr, cl, cr) = self.split_chart(chart).expect("product");
                let n1 = l.dim();
                let mut a = l.scaled(self.scale).expect("positive").ambient_position(cl, &x[..n1]);
                a.extend(rr.scaled(self.scale).expect("positive").ambient_position(cr, &x[n1..]));
                a
            }
            _ => x.to_vec(),
        }
    }

    pub(crate) fn sphere_radius(&self) -> Option<f64> {
        match &self.kind {
            Kind::Sphere { radius } => Some(radius * self.scale.sqrt()),
            _ => None,
        }
    }

    pub(crate) fn is_sphere(&self) -> bool {
        matches!(self.kind, Kind::Sphere { .. })
    }

    pub(crate) fn torus_sides(&self) -> Option<Vec<f64>> {
        match &self.kind {
            Kind::Torus { sides } => Some(sides.clone()),
            _ => None,
        }
    }

    /// Regions covering the manifold up to measure zero, or `None` for products
    /// (whose volume factorizes).
    pub(crate) fn regions(&self) -> Option<Vec<Region>> {
        match &self.kind {
            Kind::Sphere { .. } => Some(vec![Region::Box { chart: 0, lower: vec![0.0, 0.0], upper: vec![PI, TAU] }]),
            Kind::Torus { sides } => {
                Some(vec![Region::Box { chart: 0, lower: vec![0.0; sides.len()], upper: sides.clone() }])
            }
            Kind::Hyperbolic { .. } => Some(vec![Region::DeckDomain]),
            Kind::Product { .. } => None,
            Kind::Custom { charts, .. } => Some(
                charts
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let (lower, upper) = c.fundamental();
                        Region::Box { chart: i, lower: lower.to_vec(), upper: upper.to_vec() }
                    })
                    .collect(),
            ),
        }
    }

    pub(crate) fn product_factors(&self) -> Option<(ChartedMetric, ChartedMetric)> {
        match &self.kind {
            Kind::Product { left, right } => {
                Some((left.scaled(self.scale).expect("positive"), right.scaled(self.scale).expect("positive")))
            }
            _ => None,
        }
    }

    /// A point drawn from the normalized Riemannian volume, in chart 0 (or the
    /// chart containing it for multi-chart custom metrics).
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(usize, Vec<f64>), GeometryError> {
        match &self.kind {
            Kind::Sphere { .. } => {
                let u: f64 = rng.gen();
                let theta = (1.0 - 2.0 * u).clamp(-1.0 + 1e-15, 1.0 - 1e-15).acos();
                Ok((0, vec![theta, rng.gen::<f64>() * TAU]))
            }
            Kind::Torus { sides } => Ok((0, sides.iter().map(|a| rng.gen::<f64>() * a).collect())),
            Kind::Hyperbolic { deck } => {
                let rmax = deck.circumradius();
                loop {
                    let u: f64 = rng.gen();
                    let rho = (1.0 + u * (rmax.cosh() - 1.0)).acosh();
                    let psi = rng.gen::<f64>() * TAU;
                    if rho <= deck.boundary_distance(psi) {
                        let s = (rho / 2.0).tanh();
                        return Ok((0, vec![s * psi.cos(), s * psi.sin()]));
                    }
                }
            }
            Kind::Product { left, right } => {
                let (cl, xl) = left.sample_point(rng)?;
                let (cr, xr) = right.sample_point(rng)?;
                Ok((cl * right.chart_count() + cr, [xl, xr].concat()))
            }
            Kind::Custom { charts, dim } => {
                // rejection against the sqrt(det g) maximum seen on a coarse grid
                let c = &charts[0];
                let density = |x: &[f64]| self.tensor(0, x).map(|g| g.determinant().max(0.0).sqrt());
                let mut bound: f64 = 0.0;
                let (lo, hi) = c.fundamental();
                for p in interior_grid(lo, hi, 6, 0.02) {
                    bound = bound.max(density(&p)?);
                }
                bound *= 2.0;
                for _ in 0..1_000_000 {
                    let x: Vec<f64> = (0..*dim).map(|i| lo[i] + rng.gen::<f64>() * (hi[i] - lo[i])).collect();
                    if !c.contains(&x) {
                        continue;
                    }
                    if rng.gen::<f64>() * bound <= density(&x)? {
                        return Ok((0, x));
                    }
                }
                Err(GeometryError::InvalidSpec("could not sample custom metric".into()))
            }
        }
    }

    /// Interior grid of sample points (chart, coordinates) for curvature scans.
    pub fn grid_points(&self, per_axis: usize, margin: f64) -> Vec<(usize, Vec<f64>)> {
        match &self.kind {
            Kind::Sphere { .. } => interior_grid(&[0.0, 0.0], &[PI, TAU], per_axis, margin)
                .into_iter()
                .map(|p| (0, p))
                .collect(),
            Kind::Torus { sides } => interior_grid(&vec![0.0; sides.len()], sides, per_axis, margin)
                .into_iter()
                .map(|p| (0, p))
                .collect(),
            Kind::Hyperbolic { deck } => {
                let s = (deck.circumradius() / 2.0).tanh();
                interior_grid(&[-s, -s], &[s, s], per_axis, margin)
                    .into_iter()
                    .filter(|p| deck.contains(Complex64::new(p[0], p[1])))
                    .map(|p| (0, p))
                    .collect()
            }
            Kind::Product { left, right } => {
                let a = left.grid_points(per_axis, margin);
                let b = right.grid_points(per_axis, margin);
                let mut out = Vec::with_capacity(a.len() * b.len());
                for (ca, xa) in &a {
                    for (cb, xb) in &b {
                        out.push((ca * right.chart_count() + cb, [xa.clone(), xb.clone()].concat()));
                    }
                }
                out
            }
            Kind::Custom { charts, .. } => charts
                .iter()
                .enumerate()
                .flat_map(|(i, c)| {
                    let (lo, hi) = c.fundamental();
                    interior_grid(lo, hi, per_axis, margin).into_iter().map(move |p| (i, p))
                })
                .collect(),
        }
    }

    /// Checks symmetry and positive-definiteness at the given points.
    pub fn validate(&self, points: &[(usize, Vec<f64>)]) -> Result<(), GeometryError> {
        for (chart, x) in points {
            let g = self.tensor(*chart, x)?;
            let asym = (&g - g.transpose()).abs().max();
            if asym > 1e-12 * (1.0 + g.abs().max()) {
                return Err(GeometryError::NotSymmetric { point: x.clone() });
            }
            if g.clone().cholesky().is_none() {
                return Err(GeometryError::NotPositiveDefinite { point: x.clone() });
            }
        }
        Ok(())
    }
}

impl ChartedMetric {
    /// Whether every chart has constant components (geodesics are chart lines).
    pub fn is_flat(&self) -> bool {
        match &self.kind {
            Kind::Torus { .. } => true,
            Kind::Product { left, right } => left.is_flat() && right.is_flat(),
            _ => false,
        }
    }

    /// Geodesic spray `a^k = -Γ^k_ij v^i v^j`, closed-form on catalogs.
    pub fn geodesic_accel(&self, chart: usize, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), GeometryError> {
        match &self.kind {
            Kind::Sphere { .. } => {
                let (s, c) = x[0].sin_cos();
                out[0] = s * c * v[1] * v[1];
                out[1] = -2.0 * c / s * v[0] * v[1];
                Ok(())
            }
            Kind::Torus { .. } => {
                out.iter_mut().for_each(|o| *o = 0.0);
                Ok(())
            }
            Kind::Hyperbolic { .. } => {
                // conformal factor e^{2 sigma}, sigma = ln 2 - ln(1 - |z|^2)
                let w = 1.0 - x[0] * x[0] - x[1] * x[1];
                if w <= 0.0 {
                    return Err(GeometryError::PointOutsideChart { chart, point: x.to_vec() });
                }
                let ds = [2.0 * x[0] / w, 2.0 * x[1] / w];
                let vds = v[0] * ds[0] + v[1] * ds[1];
                let vv = v[0] * v[0] + v[1] * v[1];
                out[0] = -(2.0 * vds * v[0] - vv * ds[0]);
                out[1] = -(2.0 * vds * v[1] - vv * ds[1]);
                Ok(())
            }
            Kind::Product { .. } => {
                let (l, r, cl, cr) = self.split_chart(chart).expect("product");
                let n1 = l.dim();
                let (a, b) = out.split_at_mut(n1);
                l.geodesic_accel(cl, &x[..n1], &v[..n1], a)?;
                r.geodesic_accel(cr, &x[n1..], &v[n1..], b)
            }
            Kind::Custom { .. } => {
                let gam = super::christoffel(self, chart, x)?;
                gam.contract(v, v, out);
                out.iter_mut().for_each(|o| *o = -*o);
                Ok(())
            }
        }
    }

    /// Riemannian distance between two points of a catalog manifold.
    ///
    /// On hyperbolic quotients the minimum runs over deck elements moving the
    /// fundamental region by at most `2 R + 1` (R the circumradius), which is
    /// exact for distances up to 1.
    pub fn distance(&self, a: (usize, &[f64]), b: (usize, &[f64])) -> Result<f64, GeometryError> {
        let root = self.scale.sqrt();
        match &self.kind {
            Kind::Sphere { radius } => {
                let (p, _) = sphere_embed(a.0, a.1, &[0.0, 0.0]);
                let (q, _) = sphere_embed(b.0, b.1, &[0.0, 0.0]);
                let cross = [p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]];
                let sin = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
                let cos = p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
                Ok(radius * root * sin.atan2(cos))
            }
            Kind::Torus { sides } => {
                let mut s = 0.0;
                for i in 0..sides.len() {
                    let d = (a.1[i] - b.1[i]).rem_euclid(sides[i]);
                    let d = d.min(sides[i] - d);
                    s += d * d;
                }
                Ok(root * s.sqrt())
            }
            Kind::Hyperbolic { deck } => {
                let z = Complex64::new(a.1[0], a.1[1]);
                let w = Complex64::new(b.1[0], b.1[1]);
                let best = deck
                    .neighbourhood()
                    .iter()
                    .map(|g| super::deck::disk_distance(z, g.apply(w)))
                    .fold(super::deck::disk_distance(z, w), f64::min);
                Ok(root * best)
            }
            Kind::Product { .. } => {
                let (l, r, cl, cr) = self.split_chart(a.0).expect("product");
                let (_, _, dl, dr) = self.split_chart(b.0).expect("product");
                let n1 = l.dim();
                let d1 = l.distance((cl, &a.1[..n1]), (dl, &b.1[..n1]))?;
                let d2 = r.distance((cr, &a.1[n1..]), (dr, &b.1[n1..]))?;
                Ok(root * (d1 * d1 + d2 * d2).sqrt())
            }
            Kind::Custom { .. } => Err(GeometryError::Unsupported("distance on custom metrics".into())),
        }
    }
}

fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (n1, n2) = (a.nrows(), b.nrows());
    let mut m = DMatrix::zeros(n1 + n2, n1 + n2);
    m.view_mut((0, 0), (n1, n1)).copy_from(a);
    m.view_mut((n1, n1), (n2, n2)).copy_from(b);
    m
}

pub(crate) fn interior_grid(lower: &[f64], upper: &[f64], per_axis: usize, margin: f64) -> Vec<Vec<f64>> {
    let per_axis = per_axis.max(1);
    let n = lower.len();
    let axis = |i: usize| -> Vec<f64> {
        let lo = if lower[i].is_finite() && lower[i] > -1e5 { lower[i] } else { -1.0 };
        let hi = if upper[i].is_finite() && upper[i] < 1e5 { upper[i] } else { lo + 2.0 };
        let w = hi - lo;
        let (a, b) = (lo + margin * w, hi - margin * w);
        (0..per_axis)
            .map(|k| if per_axis == 1 { 0.5 * (a + b) } else { a + (b - a) * k as f64 / (per_axis - 1) as f64 })
            .collect()
    };
    let axes: Vec<Vec<f64>> = (0..n).map(axis).collect();
    let mut out = vec![Vec::new()];
    for ax in &axes {
        let mut next = Vec::with_capacity(out.len() * ax.len());
        for p in &out {
            for v in ax {
                let mut q = p.clone();
                q.push(*v);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Unit-sphere embedding of polar chart `chart` (0: about z, 1: about x) and its
/// differential applied to `v`.
pub(crate) fn sphere_embed(chart: usize, x: &[f64], v: &[f64]) -> ([f64; 3], [f64; 3]) {
    let (st, ct) = x[0].sin_cos();
    let (sp, cp) = x[1].sin_cos();
    let p = [st * cp, st * sp, ct];
    let dp = [
        ct * cp * v[0] - st * sp * v[1],
        ct * sp * v[0] + st * cp * v[1],
        -st * v[0],
    ];
    if chart == 0 {
        (p, dp)
    } else {
        ([p[2], p[0], p[1]], [dp[2], dp[0], dp[1]])
    }
}

pub(crate) fn sphere_chart(chart: usize, p: &[f64; 3], dp: &[f64; 3]) -> (Vec<f64>, Vec<f64>) {
    let (q, dq) = if chart == 0 { (*p, *dp) } else { ([p[1], p[2], p[0]], [dp[1], dp[2], dp[0]]) };
    let norm = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
    let q = q.map(|c| c / norm);
    let theta = q[2].clamp(-1.0, 1.0).acos();
    let phi = q[1].atan2(q[0]).rem_euclid(TAU);
    let rho2 = q[0] * q[0] + q[1] * q[1];
    let dtheta = -dq[2] / rho2.sqrt();
    let dphi = (q[0] * dq[1] - q[1] * dq[0]) / rho2;
    (vec![theta, phi], vec![dtheta, dphi])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_chart_round_trip() {
        let x = [1.1, 2.3];
        let v = [0.3, -0.7];
        for c in 0..2 {
            let (p, dp) = sphere_embed(c, &x, &v);
            let (y, w) = sphere_chart(c, &p, &dp);
            assert!((y[0] - x[0]).abs() < 1e-12 && (y[1] - x[1]).abs() < 1e-12);
            assert!((w[0] - v[0]).abs() < 1e-12 && (w[1] - v[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn canonicalize_switches_near_pole() {
        let m = ChartedMetric::round_sphere(1.0).unwrap();
        let c = m.canonicalize(0, &[0.1, 0.4], &[1.0, 0.0]).unwrap();
        assert_eq!(c.chart, 1);
        let a = m.ambient_position(0, &[0.1, 0.4]);
        let b = m.ambient_position(1, &c.x);
        assert!(a.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-12));
        // speed preserved by the transition
        let g0 = m.tensor(0, &[0.1, 0.4]).unwrap();
        let g1 = m.tensor(1, &c.x).unwrap();
        let v0 = nalgebra::DVector::from_vec(vec![1.0, 0.0]);
        let v1 = nalgebra::DVector::from_vec(c.v.clone());
        assert!(((v0.dot(&(&g0 * &v0))) - (v1.dot(&(&g1 * &v1)))).abs() < 1e-12);
    }

    #[test]
    fn product_is_block_diagonal() {
        let m = ChartedMetric::product(
            ChartedMetric::round_sphere(1.0).unwrap(),
            ChartedMetric::flat_torus(vec![1.0, 2.0]).unwrap(),
        );
        assert_eq!(m.dim(), 4);
        let g = m.tensor(0, &[1.0, 0.5, 0.2, 0.3]).unwrap();
        let s = 1f64.sin().powi(2);
        let expect = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, s, 1.0, 1.0]));
        assert!((g - expect).abs().max() < 1e-15);
    }

    #[test]
    fn rejects_points_outside_chart() {
        let m = ChartedMetric::half_plane();
        assert!(matches!(m.tensor(0, &[0.0, -1.0]), Err(GeometryError::PointOutsideChart { .. })));
        let s = ChartedMetric::round_sphere(1.0).unwrap();
        assert!(s.tensor(0, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn validate_flags_indefinite_metric() {
        let t: TensorFn = Arc::new(|_x: &[f64]| DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        let m = ChartedMetric::custom(2, vec![CustomChart::new(vec![0.0, 0.0], vec![1.0, 1.0], t)]).unwrap();
        let pts = m.grid_points(2, 0.1);
        assert!(matches!(m.validate(&pts), Err(GeometryError::NotPositiveDefinite { .. })));
    }
}
