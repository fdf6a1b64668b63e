//! Intersection forms of simply connected 4-manifolds, Barden invariants of
//! simply connected 5-manifolds, and the minimal-entropy decisions built on
//! them.

mod barden;
mod form;
mod group;

use serde::Serialize;
use thiserror::Error;

pub use barden::{
    barden_decompose, barden_validate, theorem_e_decision, tstructure_flags, BardenBlock, BardenIndex, BardenWord,
    FiveManifoldDecision, Flag, TStructureFlags,
};
pub use form::{
    even_form_realizable, form_of_word, homeotype_b2le2, theorem_d_decision, EvenFormVerdict, FourManifoldDecision,
    FourManifoldWord, Generator, IntersectionForm, Parity, E8, H, NOT_IN_LIST,
};
pub use group::AbelianGroup;

/// Distinct primes dividing `n`.
pub fn prime_factors(n: u64) -> Vec<u64> {
    group::factorize(n).into_iter().map(|(p, _)| p).collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid form: {0}")]
    InvalidForm(String),
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("form of rank {0} exceeds 2")]
    RankTooLarge(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid Barden invariants: {0}")]
    InvalidBarden(String),
    #[error("Brieskorn exponents must be >= 2, got {0:?}")]
    InvalidExponents(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BrieskornWeights {
    pub exponents: [u64; 4],
    pub lcm: u64,
    pub weights: [u64; 4],
    /// `gcd(q₁, …, q₄)`; the action is effective iff this is 1.
    pub gcd: u64,
}

/// Weights `q_i = lcm(a)/a_i` of the circle action
/// `z ↦ (t^{q_1} z_1, …, t^{q_4} z_4)` on the link of
/// `z₁^{a₁} + … + z₄^{a₄} = 0` in `S⁷`.
pub fn brieskorn_weights(a: [u64; 4]) -> Result<BrieskornWeights, ClassifyError> {
    if a.iter().any(|x| *x < 2) {
        return Err(ClassifyError::InvalidExponents(a.to_vec()));
    }
    let lcm = group::lcm_all(&a);
    let weights = a.map(|x| lcm / x);
    let gcd = weights.iter().fold(0u64, |acc, q| num_integer::gcd(acc, *q));
    Ok(BrieskornWeights { exponents: a, lcm, weights, gcd })
}
