use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::CollapseError;

/// Relative slack on the two verdicts.
const VERDICT_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionBound {
    /// `(det I)²` for `I = π₁ ∘ π_F (·, 0)`.
    pub det_i_sq: f64,
    /// `4^{-l} γ^{2l}` with `γ = (det F̃)²` in orthonormal bases.
    pub bound: f64,
    pub gamma: f64,
    /// Operator norm of `F̃` between `(V₂, h₂)` and `(V₁, h₁)`.
    pub norm: f64,
    pub verdict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientVolume {
    pub lambda: f64,
    /// `dvol(h_λ) / dvol(h₁)`.
    pub ratio: f64,
    pub verdict: bool,
}

/// Validated data: `F` spanned by the columns `(p_j, q_j)` of a `2l × l`
/// matrix, with `h₁, h₂` positive definite.
struct Setup {
    l: usize,
    f: DMatrix<f64>,
    p: DMatrix<f64>,
    h: DMatrix<f64>,
    h1: DMatrix<f64>,
    norm: f64,
    gamma: f64,
}

fn setup(f: &DMatrix<f64>, h1: &DMatrix<f64>, h2: &DMatrix<f64>) -> Result<Setup, CollapseError> {
    let l = h1.nrows();
    if l == 0 || h1.ncols() != l || h2.shape() != (l, l) || f.shape() != (2 * l, l) {
        return Err(CollapseError::InvalidInput(format!(
            "need l×l inner products and a 2l×l basis of F, got {:?}, {:?}, {:?}",
            h1.shape(),
            h2.shape(),
            f.shape()
        )));
    }
    let c1 = h1.clone().cholesky().ok_or_else(|| CollapseError::InvalidInput("h1 is not positive definite".into()))?;
    let c2 = h2.clone().cholesky().ok_or_else(|| CollapseError::InvalidInput("h2 is not positive definite".into()))?;
    let p = f.rows(0, l).into_owned();
    let q = f.rows(l, l).into_owned();
    let qinv = q.clone().try_inverse().filter(|m| m.iter().all(|v| v.is_finite()));
    let qinv = qinv.ok_or_else(|| CollapseError::InvalidInput("F meets V1 or is not l-dimensional".into()))?;
    // graph map F̃ : V₂ → V₁, then B in orthonormal coordinates
    let ft = &p * qinv;
    let l2inv_t = c2.l().transpose().try_inverse().expect("cholesky factor is invertible");
    let b = c1.l().transpose() * &ft * l2inv_t;
    let sv = b.clone().svd(false, false).singular_values;
    let norm = sv.max();
    if sv.min() <= 1e-14 * norm.max(1.0) {
        return Err(CollapseError::InvalidInput("F meets V2".into()));
    }
    if norm > 1.0 + 1e-12 {
        return Err(CollapseError::HypothesisViolated { norm });
    }
    let gamma = (b.transpose() * &b).determinant();
    let mut h = DMatrix::zeros(2 * l, 2 * l);
    h.view_mut((0, 0), (l, l)).copy_from(h1);
    h.view_mut((l, l), (l, l)).copy_from(h2);
    Ok(Setup { l, f: f.clone(), p, h, h1: h1.clone(), norm, gamma })
}

/// `(h₁ + h₂)`-orthogonal projection onto `F` as a `2l × 2l` matrix.
fn projection(s: &Setup) -> DMatrix<f64> {
    let gram = s.f.transpose() * &s.h * &s.f;
    let ginv = gram.try_inverse().expect("F has full rank");
    &s.f * ginv * s.f.transpose() * &s.h
}

/// For `F ⊂ V₁ ⊕ V₂` the graph of `F̃ : V₂ → V₁` with `h₁(v,v) <= h₂(w,w)` on
/// `F`: compares `(det I)²` against `4^{-l} (det F̃)^{4l}`.
pub fn lemma61_projection_bound(
    f: &DMatrix<f64>,
    h1: &DMatrix<f64>,
    h2: &DMatrix<f64>,
) -> Result<ProjectionBound, CollapseError> {
    let s = setup(f, h1, h2)?;
    let l = s.l;
    let gram = s.f.transpose() * &s.h * &s.f;
    let ginv = gram.try_inverse().expect("F has full rank");
    // π_F(v, 0) = F (FᵀHF)⁻¹ Pᵀ h₁ v; keep the V₁ block
    let i_map = &s.p * ginv * s.p.transpose() * &s.h1;
    let det = i_map.determinant();
    let det_i_sq = det * det;
    let bound = 4f64.powi(-(l as i32)) * s.gamma.powi(2 * l as i32);
    Ok(ProjectionBound {
        det_i_sq,
        bound,
        gamma: s.gamma,
        norm: s.norm,
        verdict: det_i_sq >= bound * (1.0 - VERDICT_SLACK),
    })
}

/// `h̄_λ = λ(h₁+h₂)|_F + (h₁+h₂)|_{F^⊥}` pushed to `V₁` by `π₁`; the ratio of
/// volume elements against `h₁`.
pub fn lemma61_quotient_volume(
    f: &DMatrix<f64>,
    h1: &DMatrix<f64>,
    h2: &DMatrix<f64>,
    lambda: f64,
) -> Result<QuotientVolume, CollapseError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(CollapseError::InvalidInput(format!("λ must lie in (0, 1], got {lambda}")));
    }
    let s = setup(f, h1, h2)?;
    let l = s.l;
    let pi = projection(&s);
    let comp = DMatrix::identity(2 * l, 2 * l) - &pi;
    let hbar = pi.transpose() * &s.h * &pi * lambda + comp.transpose() * &s.h * &comp;
    // quotient along V₂: Schur complement of the V₂ block
    let a = hbar.view((0, 0), (l, l));
    let b = hbar.view((0, l), (l, l));
    let d = hbar.view((l, l), (l, l)).into_owned();
    let dinv = d.try_inverse().expect("h̄ is positive definite");
    let hl = a - b * dinv * b.transpose();
    let ratio = (hl.determinant() / s.h1.determinant()).sqrt();
    Ok(QuotientVolume { lambda, ratio, verdict: ratio <= 1.0 + VERDICT_SLACK })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma61Summary {
    pub samples: usize,
    pub max_l: usize,
    pub seed: u64,
    pub projection_failures: usize,
    pub quotient_failures: usize,
    /// Smallest `(det I)² / bound` seen.
    pub min_projection_margin: f64,
    /// Largest quotient volume ratio seen.
    pub max_quotient_ratio: f64,
}

fn random_spd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    &a * a.transpose() + DMatrix::identity(n, n) * 0.2
}

fn random_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize, min_det: f64) -> DMatrix<f64> {
    loop {
        let m: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        if m.determinant().abs() >= min_det {
            return m;
        }
    }
}

/// A random instance `(F, h₁, h₂)` of dimension `l` satisfying the hypothesis:
/// `F` is the graph of a map of operator norm in `[1/3, 1]`, given in a random
/// basis.
pub fn random_lemma61_instance<R: Rng + ?Sized>(rng: &mut R, l: usize) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let h1 = random_spd(rng, l);
    let h2 = random_spd(rng, l);
    let mut b = random_invertible(rng, l, 1e-3);
    let smax = b.clone().svd(false, false).singular_values.max();
    b /= smax * rng.gen_range(1.0..3.0);
    let l1 = h1.clone().cholesky().expect("positive definite").l();
    let l2 = h2.clone().cholesky().expect("positive definite").l();
    let ft = l1.transpose().try_inverse().expect("cholesky factor is invertible") * b * l2.transpose();
    let change = random_invertible(rng, l, 0.05);
    let mut f = DMatrix::zeros(2 * l, l);
    f.view_mut((0, 0), (l, l)).copy_from(&(&ft * &change));
    f.view_mut((l, 0), (l, l)).copy_from(&change);
    (f, h1, h2)
}

/// Both verdicts on `samples` seeded random instances with `l` cycling
/// through `1..=max_l` and `λ` uniform in `[10⁻³, 1]`.
pub fn lemma61_sweep(samples: usize, max_l: usize, seed: u64) -> Result<Lemma61Summary, CollapseError> {
    if samples == 0 || max_l == 0 {
        return Err(CollapseError::InvalidInput("samples and max_l must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Lemma61Summary {
        samples,
        max_l,
        seed,
        projection_failures: 0,
        quotient_failures: 0,
        min_projection_margin: f64::INFINITY,
        max_quotient_ratio: 0.0,
    };
    for k in 0..samples {
        let (f, h1, h2) = random_lemma61_instance(&mut rng, 1 + k % max_l);
        let lambda = rng.gen_range(1e-3..=1.0);
        let a = lemma61_projection_bound(&f, &h1, &h2)?;
        let b = lemma61_quotient_volume(&f, &h1, &h2, lambda)?;
        out.projection_failures += usize::from(!a.verdict);
        out.quotient_failures += usize::from(!b.verdict);
        out.min_projection_margin = out.min_projection_margin.min(a.det_i_sq / a.bound);
        out.max_quotient_ratio = out.max_quotient_ratio.max(b.ratio);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_line_is_equality() {
        let f = DMatrix::from_column_slice(2, 1, &[1.0, 1.0]);
        let h = DMatrix::identity(1, 1);
        let r = lemma61_projection_bound(&f, &h, &h).unwrap();
        assert!((r.det_i_sq - 0.25).abs() < 1e-15 && (r.bound - 0.25).abs() < 1e-15);
        let q = lemma61_quotient_volume(&f, &h, &h, 1.0).unwrap();
        assert!((q.ratio - 1.0).abs() < 1e-14);
    }

    #[test]
    fn long_graph_violates_hypothesis() {
        let f = DMatrix::from_column_slice(2, 1, &[2.0, 1.0]);
        let h = DMatrix::identity(1, 1);
        assert!(matches!(lemma61_projection_bound(&f, &h, &h), Err(CollapseError::HypothesisViolated { .. })));
    }
}
