use std::f64::consts::TAU;

use super::metric::Region;
use super::quadrature::{pairwise_sum, GaussLegendre, QuadratureSpec};
use super::{ChartedMetric, GeometryError};

/// Riemannian volume `∫ sqrt(det g) dx` over the catalog's canonical charts.
///
/// The rule is re-run with doubled panels; a relative change above
/// `spec.tolerance` is reported as [`GeometryError::QuadratureTooCoarse`].
pub fn volume(metric: &ChartedMetric, spec: &QuadratureSpec) -> Result<f64, GeometryError> {
    if let Some((l, r)) = metric.product_factors() {
        return Ok(volume(&l, spec)? * volume(&r, spec)?);
    }
    integrate_density(metric, spec, |_, _, g| Ok(g))
}

/// Integral of `weight(chart, x, sqrt(det g(x)))` over the canonical charts,
/// with the same refinement check as [`volume`].
pub fn integrate_density<F>(metric: &ChartedMetric, spec: &QuadratureSpec, weight: F) -> Result<f64, GeometryError>
where
    F: Fn(usize, &[f64], f64) -> Result<f64, GeometryError>,
{
    let regions = metric
        .regions()
        .ok_or_else(|| GeometryError::Unsupported("density integration over product charts".into()))?;
    let coarse = run(metric, &regions, spec, &weight)?;
    let refined = run(metric, &regions, &spec.refined(), &weight)?;
    let scale = coarse.abs().max(refined.abs()).max(f64::MIN_POSITIVE);
    if (coarse - refined).abs() > spec.tolerance * scale {
        return Err(GeometryError::QuadratureTooCoarse { coarse, refined });
    }
    Ok(refined)
}

fn run<F>(metric: &ChartedMetric, regions: &[Region], spec: &QuadratureSpec, weight: &F) -> Result<f64, GeometryError>
where
    F: Fn(usize, &[f64], f64) -> Result<f64, GeometryError>,
{
    let gl = GaussLegendre::new(spec.order);
    let mut parts = Vec::with_capacity(regions.len());
    for region in regions {
        let v = match region {
            Region::Box { chart, lower, upper } => box_integral(metric, *chart, lower, upper, &gl, spec.panels, weight)?,
            Region::DeckDomain => deck_integral(metric, &gl, spec.panels, weight)?,
        };
        parts.push(v);
    }
    Ok(pairwise_sum(&parts))
}

fn box_integral<F>(
    metric: &ChartedMetric,
    chart: usize,
    lower: &[f64],
    upper: &[f64],
    gl: &GaussLegendre,
    panels: usize,
    weight: &F,
) -> Result<f64, GeometryError>
where
    F: Fn(usize, &[f64], f64) -> Result<f64, GeometryError>,
{
    let n = lower.len();
    if lower.iter().chain(upper).any(|v| !v.is_finite() || v.abs() > 1e5) {
        return Err(GeometryError::Unsupported("volume over an unbounded chart".into()));
    }
    let axes: Vec<Vec<(f64, f64)>> = (0..n).map(|i| gl.composite(lower[i], upper[i], panels)).collect();
    let mut terms = Vec::new();
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    loop {
        let mut w = 1.0;
        for i in 0..n {
            let (xi, wi) = axes[i][idx[i]];
            x[i] = xi;
            w *= wi;
        }
        let g = metric.tensor(chart, &x)?;
        let det = g.determinant();
        if !(det > 0.0) {
            return Err(GeometryError::NotPositiveDefinite { point: x.clone() });
        }
        terms.push(w * weight(chart, &x, det.sqrt())?);
        let mut d = 0;
        loop {
            if d == n {
                return Ok(pairwise_sum(&terms));
            }
            idx[d] += 1;
            if idx[d] < axes[d].len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

fn deck_integral<F>(metric: &ChartedMetric, gl: &GaussLegendre, panels: usize, weight: &F) -> Result<f64, GeometryError>
where
    F: Fn(usize, &[f64], f64) -> Result<f64, GeometryError>,
{
    let deck = metric.deck().expect("deck region only on hyperbolic quotients");
    // angular panels follow the region's vertices, where the boundary has kinks
    let mut cuts: Vec<f64> = deck.vertex_directions().iter().map(|a| a.rem_euclid(TAU)).collect();
    cuts.sort_by(f64::total_cmp);
    if cuts.is_empty() {
        cuts.push(0.0);
    }
    let mut terms = Vec::new();
    for s in 0..cuts.len() {
        let a = cuts[s];
        let b = if s + 1 < cuts.len() { cuts[s + 1] } else { cuts[0] + TAU };
        for (psi, wpsi) in gl.composite(a, b, panels.div_ceil(2).max(1)) {
            let edge = (deck.boundary_distance(psi) / 2.0).tanh();
            let (sn, cs) = psi.sin_cos();
            for (r, wr) in gl.composite(0.0, edge, panels) {
                let x = [r * cs, r * sn];
                let g = metric.tensor(0, &x)?;
                let det = g.determinant();
                terms.push(wpsi * wr * r * weight(0, &x, det.sqrt())?);
            }
        }
    }
    Ok(pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn catalog_volumes() {
        let q = QuadratureSpec::default();
        let s = volume(&ChartedMetric::round_sphere(1.0).unwrap(), &q).unwrap();
        assert!((s - 4.0 * PI).abs() < 1e-9);
        let t = volume(&ChartedMetric::flat_torus(vec![2.0, 3.0]).unwrap(), &q).unwrap();
        assert!((t - 6.0).abs() < 1e-12);
        let h = volume(&ChartedMetric::genus2_octagon(), &q).unwrap();
        assert!((h - 4.0 * PI).abs() < 1e-7, "{h}");
    }

    #[test]
    fn coarse_rule_is_flagged() {
        let q = QuadratureSpec { order: 1, panels: 1, tolerance: 1e-10 };
        let e = volume(&ChartedMetric::round_sphere(1.0).unwrap(), &q);
        assert!(matches!(e, Err(GeometryError::QuadratureTooCoarse { .. })));
    }
}
