//! Topological-entropy estimators, exact entropy laws and bounds.

mod chain;
mod fit;
mod separated;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geodesic::{arc_lengths, GeodesicError, ShootOptions};
use crate::geom::quadrature::pairwise_sum;
use crate::geom::{curvature_bounds, ChartedMetric, CatalogTag, CurvatureReport, GeometryError, SampleGrid};

pub use chain::{chain_check, ChainInputs, ChainReport, Verdict};
pub use fit::{growth_fit, Fit};
pub use separated::{separated_set_estimate, SeparatedEstimate, SeparatedOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Geodesic(GeodesicError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("arc counts did not stabilize: {0}")]
    NonStabilizedCounts(GeodesicError),
    #[error("growth fit residual {residual} exceeds {threshold}; increase T_max")]
    InsufficientT { residual: f64, threshold: f64 },
    #[error("greedy separated set used all {0} samples; draw more samples or raise epsilon")]
    SampleStarvation(usize),
    #[error("volume entropy is not known for {0}")]
    UnsupportedCatalog(String),
}

impl From<GeodesicError> for EntropyError {
    fn from(e: GeodesicError) -> Self {
        match e {
            GeodesicError::ResolutionTooCoarse { .. } => EntropyError::NonStabilizedCounts(e),
            GeodesicError::Geometry(g) => EntropyError::Geometry(g),
            other => EntropyError::Geodesic(other),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Mane,
    Separated,
    VolumeEntropy,
    Analytic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub method: Method,
    /// Volume entropy, when the catalog knows it.
    pub lower_bracket: Option<f64>,
    /// Coarse curvature bound `(n-1) sqrt(k)`.
    pub upper_bracket: Option<f64>,
    pub fit: Option<Fit>,
    pub seed: Option<u64>,
}

impl EntropyEstimate {
    /// Whether `lower - tol <= value <= upper + tol` for the brackets present.
    pub fn within_brackets(&self, tol: f64) -> bool {
        self.lower_bracket.is_none_or(|l| self.value >= l - tol) && self.upper_bracket.is_none_or(|u| self.value <= u + tol)
    }

    pub fn report(&self) -> EntropyReport {
        EntropyReport {
            method: self.method,
            h: self.value,
            lambda: self.lower_bracket,
            upper: self.upper_bracket,
            fit: self.fit.as_ref().map(|f| FitReport {
                ts: f.ts.clone(),
                logs: f.logs.clone(),
                slope: f.rate,
                residual: f.residual,
                plain_slope: f.slope,
                log_coefficient: f.log_coefficient,
            }),
            seed: self.seed,
        }
    }
}

/// Serialized form of an estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub method: Method,
    pub h: f64,
    pub lambda: Option<f64>,
    pub upper: Option<f64>,
    pub fit: Option<FitReport>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    #[serde(rename = "Ts")]
    pub ts: Vec<f64>,
    pub logs: Vec<f64>,
    /// Exponential rate of the growth model.
    pub slope: f64,
    pub residual: f64,
    pub plain_slope: f64,
    pub log_coefficient: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManeOptions {
    pub pairs: usize,
    pub t_max: f64,
    pub seed: u64,
    /// Number of equally spaced horizons `T_max k / grid` in the T-grid.
    pub grid: usize,
    /// Angular resolution for shooting (unused on hyperbolic quotients).
    pub resolution: usize,
    pub shoot: ShootOptions,
    /// Largest acceptable RMS residual of the growth fit.
    pub residual_threshold: f64,
    /// Curvature sampling for the upper bracket.
    pub curvature_grid: SampleGrid,
}

impl Default for ManeOptions {
    fn default() -> Self {
        Self {
            pairs: 16,
            t_max: 20.0,
            seed: 0,
            grid: 16,
            resolution: 720,
            shoot: ShootOptions::default(),
            residual_threshold: 0.25,
            curvature_grid: SampleGrid::uniform(5),
        }
    }
}

/// Entropy from the growth of the pair-averaged arc count `n_T(p, q)`.
///
/// The average over endpoint pairs drawn uniformly from the volume is taken at
/// every horizon of the T-grid; the rate comes from [`growth_fit`] over
/// `[T_max/2, T_max]`.
pub fn mane_estimate(metric: &ChartedMetric, opts: &ManeOptions) -> Result<EntropyEstimate, EntropyError> {
    if opts.pairs < 8 {
        return Err(EntropyError::InvalidInput(format!("need at least 8 endpoint pairs, got {}", opts.pairs)));
    }
    if !(opts.t_max >= 5.0) {
        return Err(EntropyError::InvalidInput(format!("T_max must be at least 5, got {}", opts.t_max)));
    }
    if opts.grid < 4 {
        return Err(EntropyError::InvalidInput("T-grid needs at least 4 horizons".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let diameter = metric.sphere_radius().map(|r| std::f64::consts::PI * r);
    let ts: Vec<f64> = (1..=opts.grid).map(|k| opts.t_max * k as f64 / opts.grid as f64).collect();
    let mut counts = vec![Vec::with_capacity(opts.pairs); ts.len()];
    let mut done = 0;
    let mut attempts = 0;
    while done < opts.pairs {
        attempts += 1;
        if attempts > 100 * opts.pairs {
            return Err(EntropyError::InvalidInput("could not draw admissible endpoint pairs".into()));
        }
        let (cp, p) = metric.sample_point(&mut rng)?;
        let (cq, q) = metric.sample_point(&mut rng)?;
        let d = metric.distance((cp, &p), (cq, &q))?;
        // coincident and antipodal pairs form a null set; redraw them
        if d < 1e-3 || diameter.is_some_and(|dm| dm - d < 1e-3) {
            continue;
        }
        let lengths = arc_lengths(metric, (cp, &p), (cq, &q), opts.t_max, opts.resolution, &opts.shoot)?;
        for (k, t) in ts.iter().enumerate() {
            counts[k].push(lengths.partition_point(|l| *l <= *t) as f64);
        }
        done += 1;
    }
    let averages: Vec<f64> = counts.iter().map(|c| pairwise_sum(c) / c.len() as f64).collect();
    let fit = growth_fit(&ts, &averages, opts.t_max / 2.0)?;
    if fit.residual > opts.residual_threshold {
        return Err(EntropyError::InsufficientT { residual: fit.residual, threshold: opts.residual_threshold });
    }
    let lower = volume_entropy(metric).ok();
    let upper = match curvature_bounds(metric, &opts.curvature_grid) {
        Ok(r) => Some(manning_upper_bound(&r).coarse),
        Err(_) => None,
    };
    Ok(EntropyEstimate {
        value: fit.rate.max(0.0),
        method: Method::Mane,
        lower_bracket: lower,
        upper_bracket: upper,
        fit: Some(fit),
        seed: Some(opts.seed),
    })
}

/// Exponential growth rate of ball volumes in the universal cover.
pub fn volume_entropy(metric: &ChartedMetric) -> Result<f64, EntropyError> {
    fn of(tag: &CatalogTag) -> Result<f64, EntropyError> {
        match tag {
            CatalogTag::RoundSphere { .. } | CatalogTag::FlatTorus { .. } => Ok(0.0),
            // area of a disk of radius r is 2π(cosh(r/a) - 1) a² at curvature -1/a²
            CatalogTag::HyperbolicQuotient { curvature, .. } => Ok((-curvature).sqrt()),
            CatalogTag::Product { left, right } => Ok(product_entropy(of(left)?, of(right)?)),
            CatalogTag::Custom => Err(EntropyError::UnsupportedCatalog("custom metrics".into())),
        }
    }
    of(&metric.tag())
}

/// `h_top(c g) = h_top(g) / sqrt(c)`.
pub fn scale_entropy(h: f64, c: f64) -> Result<f64, EntropyError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(EntropyError::InvalidInput(format!("scale must be positive, got {c}")));
    }
    Ok(h / c.sqrt())
}

/// Entropy of a Riemannian product.
pub fn product_entropy(h1: f64, h2: f64) -> f64 {
    h1.hypot(h2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManningBounds {
    /// `(n-1)/2 sqrt(K_max) - ricci_min / (2 sqrt(K_max))`, when `K_max > 0`.
    pub refined: Option<f64>,
    /// `(n-1) sqrt(k)`.
    pub coarse: f64,
}

pub fn manning_upper_bound(report: &CurvatureReport) -> ManningBounds {
    let n = report.dim as f64;
    let coarse = (n - 1.0) * report.k_bound.max(0.0).sqrt();
    let refined = (report.k_max > 0.0).then(|| {
        let s = report.k_max.sqrt();
        (n - 1.0) / 2.0 * s - report.ricci_min / (2.0 * s)
    });
    ManningBounds { refined, coarse }
}
