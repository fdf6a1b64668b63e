use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EntropyError;
use crate::geodesic::{GeodesicState, Ray};
use crate::geom::ChartedMetric;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatedOptions {
    pub epsilon: f64,
    /// Time horizon of the flow.
    pub t: f64,
    pub samples: usize,
    pub seed: u64,
    /// Speed of the flow; `c` runs `φ_{ct}`.
    pub speed: f64,
    /// Number of equally spaced times at which `d(φ_t x, φ_t y)` is compared.
    pub checkpoints: usize,
    pub step: f64,
}

impl Default for SeparatedOptions {
    fn default() -> Self {
        Self { epsilon: 0.5, t: 5.0, samples: 2000, seed: 0, speed: 1.0, checkpoints: 100, step: 0.01 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatedEstimate {
    /// `(1/T) log(cardinality)`.
    pub value: f64,
    pub cardinality: usize,
    pub samples: usize,
}

/// Greedy maximal `(T, ε)`-separated subset of sampled orbit segments under
/// `d_T(x, y) = max_t d(φ_t x, φ_t y)`, with `t` on the checkpoint grid.
pub fn separated_set_estimate(metric: &ChartedMetric, opts: &SeparatedOptions) -> Result<SeparatedEstimate, EntropyError> {
    if !(opts.epsilon > 0.0) || !(opts.t > 0.0) || !(opts.speed > 0.0) || opts.samples == 0 || opts.checkpoints == 0 {
        return Err(EntropyError::InvalidInput("epsilon, T, speed, samples and checkpoints must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = metric.dim();
    let dt = opts.t / opts.checkpoints as f64;
    let mut orbits: Vec<Vec<(usize, Vec<f64>)>> = Vec::with_capacity(opts.samples);
    for _ in 0..opts.samples {
        let (chart, x) = metric.sample_point(&mut rng)?;
        let g = metric.tensor(chart, &x)?;
        let l = g
            .cholesky()
            .ok_or_else(|| crate::geom::GeometryError::NotPositiveDefinite { point: x.clone() })?
            .l();
        let frame = l.transpose().try_inverse().expect("cholesky factor is invertible");
        let w: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
        let norm = w.iter().map(|c| c * c).sum::<f64>().sqrt();
        let u = nalgebra::DVector::from_iterator(n, w.iter().map(|c| c / norm * opts.speed));
        let v = &frame * u;
        let mut ray = Ray::start(metric, &GeodesicState::new(chart, x, v.iter().copied().collect()))?;
        let mut orbit = Vec::with_capacity(opts.checkpoints + 1);
        orbit.push((ray.chart, ray.x.clone()));
        for _ in 0..opts.checkpoints {
            ray.advance(dt, opts.step / opts.speed)?;
            orbit.push((ray.chart, ray.x.clone()));
        }
        orbits.push(orbit);
    }
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..orbits.len() {
        let mut separated = true;
        for &j in &kept {
            let mut apart = false;
            for (a, b) in orbits[i].iter().zip(&orbits[j]) {
                if metric.distance((a.0, &a.1), (b.0, &b.1))? > opts.epsilon {
                    apart = true;
                    break;
                }
            }
            if !apart {
                separated = false;
                break;
            }
        }
        if separated {
            kept.push(i);
        }
    }
    if kept.len() == opts.samples {
        return Err(EntropyError::SampleStarvation(opts.samples));
    }
    Ok(SeparatedEstimate { value: (kept.len() as f64).ln() / opts.t, cardinality: kept.len(), samples: opts.samples })
}

/// Box-Muller standard normal draw.
fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = 1.0 - rng.gen::<f64>();
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}
