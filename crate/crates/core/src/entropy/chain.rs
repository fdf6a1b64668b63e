use serde::{Deserialize, Serialize};

/// Inputs of the chain `c(n)‖M‖ <= λⁿ <= hⁿ <= (n-1)ⁿ MinVol`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainInputs {
    pub n: usize,
    pub lambda: f64,
    pub h: f64,
    pub simplicial_volume: Option<f64>,
    /// The constant `c(n)`; the first link is only evaluated when supplied.
    pub c_n: Option<f64>,
    pub min_vol: Option<f64>,
    /// Allowed violation, measured in entropy units.
    pub tolerance: f64,
}

impl ChainInputs {
    pub fn new(n: usize, lambda: f64, h: f64) -> Self {
        Self { n, lambda, h, simplicial_volume: None, c_n: None, min_vol: None, tolerance: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    /// `slack = rhs - lhs` in entropy units.
    Holds { lhs: f64, rhs: f64, slack: f64 },
    Fails { lhs: f64, rhs: f64, slack: f64 },
    NotEvaluated,
}

impl Verdict {
    fn compare(lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = rhs - lhs;
        if slack >= -tol {
            Verdict::Holds { lhs, rhs, slack }
        } else {
            Verdict::Fails { lhs, rhs, slack }
        }
    }

    pub fn holds(&self) -> Option<bool> {
        match self {
            Verdict::Holds { .. } => Some(true),
            Verdict::Fails { .. } => Some(false),
            Verdict::NotEvaluated => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub inputs: ChainInputs,
    /// `(c(n)‖M‖)^{1/n} <= λ`.
    pub simplicial: Verdict,
    /// `λ <= h`.
    pub manning: Verdict,
    /// `h <= (n-1) MinVol^{1/n}`.
    pub min_vol: Verdict,
}

impl ChainReport {
    /// Whether every evaluated link holds.
    pub fn consistent(&self) -> bool {
        [&self.simplicial, &self.manning, &self.min_vol].iter().all(|v| v.holds() != Some(false))
    }
}

/// Checks the supplied links of the chain, each compared after taking n-th
/// roots so that the tolerance is in entropy units.
pub fn chain_check(inputs: &ChainInputs) -> ChainReport {
    let n = inputs.n.max(1) as f64;
    let tol = inputs.tolerance;
    let simplicial = match (inputs.simplicial_volume, inputs.c_n) {
        (Some(v), Some(c)) => Verdict::compare((c * v).max(0.0).powf(1.0 / n), inputs.lambda, tol),
        _ => Verdict::NotEvaluated,
    };
    let manning = Verdict::compare(inputs.lambda, inputs.h, tol);
    let min_vol = match inputs.min_vol {
        Some(mv) => Verdict::compare(inputs.h, (n - 1.0) * mv.max(0.0).powf(1.0 / n), tol),
        None => Verdict::NotEvaluated,
    };
    ChainReport { inputs: inputs.clone(), simplicial, manning, min_vol }
}
