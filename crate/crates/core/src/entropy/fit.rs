use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::EntropyError;

/// Least-squares growth fit of `log n(T)` on a window of horizons.
///
/// The model is `log n ≈ h T + k log T + c`: polynomial growth shows up in
/// `k`, exponential growth in `h`. The window is `T >= window_start` with
/// `n(T) > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub ts: Vec<f64>,
    pub logs: Vec<f64>,
    pub window: (f64, f64),
    /// Fitted exponential rate `h`.
    pub rate: f64,
    /// Fitted polynomial degree `k`.
    pub log_coefficient: f64,
    pub intercept: f64,
    /// Plain slope of `log n` against `T` over the window.
    pub slope: f64,
    /// RMS residual of the three-term model.
    pub residual: f64,
}

pub fn growth_fit(ts: &[f64], values: &[f64], window_start: f64) -> Result<Fit, EntropyError> {
    if ts.len() != values.len() {
        return Err(EntropyError::InvalidInput("horizons and counts differ in length".into()));
    }
    let (wt, wl): (Vec<f64>, Vec<f64>) = ts
        .iter()
        .zip(values)
        .filter(|(t, v)| **t >= window_start && **v > 0.0)
        .map(|(t, v)| (*t, v.ln()))
        .unzip();
    if wt.len() < 4 {
        return Err(EntropyError::InvalidInput(format!(
            "growth fit needs 4 horizons with positive counts, got {}",
            wt.len()
        )));
    }
    let m = wt.len();
    let a = DMatrix::from_fn(m, 3, |i, j| match j {
        0 => wt[i],
        1 => wt[i].ln(),
        _ => 1.0,
    });
    let b = DVector::from_vec(wl.clone());
    let coef = a.clone().svd(true, true).solve(&b, 1e-14).map_err(|e| EntropyError::InvalidInput(e.to_string()))?;
    let r = &a * &coef - &b;
    let residual = (r.norm_squared() / m as f64).sqrt();

    let mt = wt.iter().sum::<f64>() / m as f64;
    let ml = wl.iter().sum::<f64>() / m as f64;
    let sxy: f64 = wt.iter().zip(&wl).map(|(t, l)| (t - mt) * (l - ml)).sum();
    let sxx: f64 = wt.iter().map(|t| (t - mt).powi(2)).sum();

    Ok(Fit {
        ts: ts.to_vec(),
        logs: values.iter().map(|v| if *v > 0.0 { v.ln() } else { f64::NEG_INFINITY }).collect(),
        window: (wt[0], wt[m - 1]),
        rate: coef[0],
        log_coefficient: coef[1],
        intercept: coef[2],
        slope: sxy / sxx,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separates_polynomial_from_exponential() {
        let ts: Vec<f64> = (1..=20).map(|k| k as f64).collect();
        let poly: Vec<f64> = ts.iter().map(|t| 3.0 * t * t).collect();
        let f = growth_fit(&ts, &poly, 10.0).unwrap();
        assert!(f.rate.abs() < 1e-9 && (f.log_coefficient - 2.0).abs() < 1e-9);
        assert!(f.slope > 0.1);
        let expo: Vec<f64> = ts.iter().map(|t| 0.5 * (0.7 * t).exp()).collect();
        let g = growth_fit(&ts, &expo, 10.0).unwrap();
        assert!((g.rate - 0.7).abs() < 1e-9 && (g.slope - 0.7).abs() < 1e-9);
    }
}
