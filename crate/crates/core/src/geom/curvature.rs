use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ChartedMetric, GeometryError};

/// How metric derivatives are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Differentiation {
    /// Closed-form partials where the chart provides them, else central differences.
    Auto,
    FiniteDifference,
}

/// Christoffel symbols `gamma[k][i][j] = Γ^k_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    pub dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    /// `Γ^k_ij u^i w^j` for every `k`.
    pub fn contract(&self, u: &[f64], w: &[f64], out: &mut [f64]) {
        let n = self.dim;
        for (k, o) in out.iter_mut().enumerate().take(n) {
            let mut s = 0.0;
            for i in 0..n {
                let row = &self.data[(k * n + i) * n..(k * n + i + 1) * n];
                let mut t = 0.0;
                for j in 0..n {
                    t += row[j] * w[j];
                }
                s += u[i] * t;
            }
            *o = s;
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.dim;
        (0..n).all(|k| (0..n).all(|i| (0..n).all(|j| self.get(k, i, j) == self.get(k, j, i))))
    }
}

pub fn christoffel(metric: &ChartedMetric, chart: usize, x: &[f64]) -> Result<Christoffel, GeometryError> {
    christoffel_with(metric, chart, x, Differentiation::Auto)
}

pub fn christoffel_with(
    metric: &ChartedMetric,
    chart: usize,
    x: &[f64],
    how: Differentiation,
) -> Result<Christoffel, GeometryError> {
    let g = metric.tensor(chart, x)?;
    let d = match how {
        Differentiation::Auto => metric.partials(chart, x)?,
        Differentiation::FiniteDifference => metric.fd_partials(chart, x)?,
    };
    let ginv = g.clone().try_inverse().ok_or_else(|| GeometryError::SingularMetric { point: x.to_vec() })?;
    if !ginv.iter().all(|v| v.is_finite()) {
        return Err(GeometryError::SingularMetric { point: x.to_vec() });
    }
    let n = g.nrows();
    let mut data = vec![0.0; n * n * n];
    for i in 0..n {
        for j in i..n {
            // lowered symbol [ij, l]
            let low: Vec<f64> = (0..n).map(|l| 0.5 * (d[i][(j, l)] + d[j][(i, l)] - d[l][(i, j)])).collect();
            for k in 0..n {
                let v: f64 = (0..n).map(|l| ginv[(k, l)] * low[l]).sum();
                data[(k * n + i) * n + j] = v;
                data[(k * n + j) * n + i] = v;
            }
        }
    }
    Ok(Christoffel { dim: n, data })
}

/// Riemann tensor `R^l_ijk`, the `l`-component of `R(d_i, d_j) d_k`,
/// with `R(X,Y) = [∇_X, ∇_Y] - ∇_[X,Y]`.
#[derive(Clone, Debug)]
pub struct Riemann {
    pub dim: usize,
    data: Vec<f64>,
    /// `R_{bijk} = g_{bl} R^l_{ijk}`, projected onto the symmetries of a
    /// curvature tensor.
    lowered: Vec<f64>,
    metric: DMatrix<f64>,
}

impl Riemann {
    #[inline]
    pub fn get(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim;
        self.data[((l * n + i) * n + j) * n + k]
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    /// `g(R(u,v)v, u)`.
    pub fn quadrilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.dim;
        let mut out = 0.0;
        for b in 0..n {
            for i in 0..n {
                let ub = u[b] * u[i];
                for j in 0..n {
                    for k in 0..n {
                        out += self.lowered[((b * n + i) * n + j) * n + k] * ub * v[j] * v[k];
                    }
                }
            }
        }
        out
    }

    pub fn sectional(&self, u: &[f64], v: &[f64]) -> Result<f64, GeometryError> {
        let g = &self.metric;
        let uu = DVector::from_column_slice(u);
        let vv = DVector::from_column_slice(v);
        let guu = uu.dot(&(g * &uu));
        let gvv = vv.dot(&(g * &vv));
        let guv = uu.dot(&(g * &vv));
        let area = guu * gvv - guv * guv;
        if !(area > 1e-14 * guu * gvv) {
            return Err(GeometryError::DegeneratePlane);
        }
        Ok(self.quadrilinear(u, v) / area)
    }

    /// Ricci tensor `Ric_jk = R^i_ijk`.
    pub fn ricci(&self) -> DMatrix<f64> {
        let n = self.dim;
        let mut ric = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                ric[(j, k)] = (0..n).map(|i| self.get(i, i, j, k)).sum();
            }
        }
        // symmetric up to differencing error
        (&ric + ric.transpose()) * 0.5
    }
}

pub fn riemann(metric: &ChartedMetric, chart: usize, x: &[f64]) -> Result<Riemann, GeometryError> {
    let n = metric.dim();
    let g = metric.tensor(chart, x)?;
    let gam = christoffel(metric, chart, x)?;
    // dgam[i] = ∂_i Γ
    let mut dgam = Vec::with_capacity(n);
    let mut xp = x.to_vec();
    for i in 0..n {
        let h = 1e-4 * (1.0 + x[i].abs());
        xp[i] = x[i] + h;
        let p = christoffel(metric, chart, &xp)?;
        xp[i] = x[i] - h;
        let m = christoffel(metric, chart, &xp)?;
        xp[i] = x[i];
        dgam.push(p.data.iter().zip(&m.data).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<f64>>());
    }
    let at = |v: &Vec<f64>, l: usize, j: usize, k: usize| v[(l * n + j) * n + k];
    let mut data = vec![0.0; n * n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut r = at(&dgam[i], l, j, k) - at(&dgam[j], l, i, k);
                    for m in 0..n {
                        r += gam.get(l, i, m) * gam.get(m, j, k) - gam.get(l, j, m) * gam.get(m, i, k);
                    }
                    data[((l * n + i) * n + j) * n + k] = r;
                }
            }
        }
    }
    let idx = |b: usize, i: usize, j: usize, k: usize| ((b * n + i) * n + j) * n + k;
    let mut low = vec![0.0; n * n * n * n];
    for b in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    low[idx(b, i, j, k)] = (0..n).map(|l| g[(b, l)] * data[idx(l, i, j, k)]).sum();
                }
            }
        }
    }
    // antisymmetric in (b, k) as well as (i, j), and symmetric under swapping the pairs
    let mut lowered = vec![0.0; low.len()];
    for b in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let anti = |b, i, j, k| 0.5 * (low[idx(b, i, j, k)] - low[idx(k, i, j, b)]);
                    lowered[idx(b, i, j, k)] = 0.5 * (anti(b, i, j, k) + anti(i, b, k, j));
                }
            }
        }
    }
    Ok(Riemann { dim: n, data, lowered, metric: g })
}

pub fn sectional_curvature(
    metric: &ChartedMetric,
    chart: usize,
    x: &[f64],
    u: &[f64],
    v: &[f64],
) -> Result<f64, GeometryError> {
    riemann(metric, chart, x)?.sectional(u, v)
}

/// Where curvature is sampled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleGrid {
    /// `per_axis^n` points of the catalog's canonical charts, with a relative
    /// margin kept away from chart boundaries.
    Uniform { per_axis: usize, margin: f64, random_planes: usize, seed: u64 },
    Points { points: Vec<(usize, Vec<f64>)>, random_planes: usize, seed: u64 },
}

impl SampleGrid {
    pub fn uniform(per_axis: usize) -> Self {
        SampleGrid::Uniform { per_axis, margin: 0.05, random_planes: 8, seed: 0 }
    }

    pub fn points(points: Vec<(usize, Vec<f64>)>) -> Self {
        SampleGrid::Points { points, random_planes: 8, seed: 0 }
    }

    pub fn describe(&self) -> String {
        match self {
            SampleGrid::Uniform { per_axis, margin, random_planes, seed } => {
                format!("uniform per_axis={per_axis} margin={margin} random_planes={random_planes} seed={seed}")
            }
            SampleGrid::Points { points, random_planes, seed } => {
                format!("points n={} random_planes={random_planes} seed={seed}", points.len())
            }
        }
    }

    fn resolve(&self, metric: &ChartedMetric) -> (Vec<(usize, Vec<f64>)>, usize, u64) {
        match self {
            SampleGrid::Uniform { per_axis, margin, random_planes, seed } => {
                (metric.grid_points(*per_axis, *margin), *random_planes, *seed)
            }
            SampleGrid::Points { points, random_planes, seed } => (points.clone(), *random_planes, *seed),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub grid: String,
    pub points: usize,
    pub dim: usize,
    pub k_min: f64,
    pub k_max: f64,
    pub ricci_min: f64,
    pub scalar_range: (f64, f64),
    pub k_bound: f64,
}

/// Extremal sectional, Ricci and scalar curvature over a grid. Planes are the
/// coordinate planes of a g-orthonormal frame plus seeded random planes;
/// `ricci_min` is exact per point (lowest eigenvalue of Ric relative to g).
pub fn curvature_bounds(metric: &ChartedMetric, grid: &SampleGrid) -> Result<CurvatureReport, GeometryError> {
    let (points, random_planes, seed) = grid.resolve(metric);
    if points.is_empty() {
        return Err(GeometryError::EmptyGrid);
    }
    let n = metric.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut k_min = f64::INFINITY;
    let mut k_max = f64::NEG_INFINITY;
    let mut ricci_min = f64::INFINITY;
    let mut s_lo = f64::INFINITY;
    let mut s_hi = f64::NEG_INFINITY;
    for (chart, x) in &points {
        // prefer the chart the atlas would choose (e.g. away from polar singularities)
        let (chart, x) = match metric.canonicalize(*chart, x, &vec![0.0; n]) {
            Ok(c) if metric.in_chart(c.chart, &c.x) => (c.chart, c.x),
            _ => (*chart, x.clone()),
        };
        let (chart, x) = (&chart, &x);
        let r = riemann(metric, *chart, x)?;
        let g = r.metric().clone();
        let l = g.clone().cholesky().ok_or_else(|| GeometryError::NotPositiveDefinite { point: x.clone() })?.l();
        let linv = l.clone().try_inverse().ok_or_else(|| GeometryError::SingularMetric { point: x.clone() })?;
        // columns of frame are g-orthonormal
        let frame = linv.transpose();
        let mut planes: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                planes.push((frame.column(a).iter().copied().collect(), frame.column(b).iter().copied().collect()));
            }
        }
        for _ in 0..random_planes {
            let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            planes.push((u, w));
        }
        for (u, w) in &planes {
            match r.sectional(u, w) {
                Ok(k) => {
                    k_min = k_min.min(k);
                    k_max = k_max.max(k);
                }
                Err(GeometryError::DegeneratePlane) => {}
                Err(e) => return Err(e),
            }
        }
        let ric = r.ricci();
        let normalized = &linv * &ric * linv.transpose();
        let sym = (&normalized + normalized.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        ricci_min = ricci_min.min(eig.eigenvalues.min());
        let scalar = eig.eigenvalues.sum();
        s_lo = s_lo.min(scalar);
        s_hi = s_hi.max(scalar);
    }
    Ok(CurvatureReport {
        grid: grid.describe(),
        points: points.len(),
        dim: n,
        k_min,
        k_max,
        ricci_min,
        scalar_range: (s_lo, s_hi),
        k_bound: k_min.abs().max(k_max.abs()),
    })
}
