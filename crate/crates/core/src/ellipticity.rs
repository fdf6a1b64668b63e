//! Growth of loop-space homology of `(2s-1)`-connected `(4s+1)`-manifolds
//! from the minimal resolution of the residue field, and the resulting
//! ellipticity tests.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::classify::AbelianGroup;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthKind {
    Polynomial,
    Exponential,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthClass {
    pub kind: GrowthKind,
    /// `a + √(a² - 1)` when exponential.
    pub rate: Option<f64>,
}

/// Betti numbers `b_0..=b_n` of the minimal resolution, where
/// `a = dim H_{2s}(M; k)`: `b_0 = 1`, `b_1 = 2a`, `b_i = 2a b_{i-1} - b_{i-2}`.
/// For `a = 0` the sequence is constant 1.
pub fn tor_betti_sequence(a: u64, n: usize) -> Vec<BigUint> {
    if a == 0 {
        return vec![BigUint::one(); n + 1];
    }
    let two_a = BigUint::from(2 * a);
    let mut out = Vec::with_capacity(n + 1);
    out.push(BigUint::one());
    if n >= 1 {
        out.push(two_a.clone());
    }
    for i in 2..=n {
        let next = &two_a * &out[i - 1] - &out[i - 2];
        out.push(next);
    }
    out
}

pub fn growth_class(a: u64) -> GrowthClass {
    if a <= 1 {
        GrowthClass { kind: GrowthKind::Polynomial, rate: None }
    } else {
        let a = a as f64;
        GrowthClass { kind: GrowthKind::Exponential, rate: Some(a + (a * a - 1.0).sqrt()) }
    }
}

/// `dim H₂(M; k)` for `k = Q` (`p = 0`) or `k = F_p`: the rank plus the
/// number of invariant factors divisible by `p`.
pub fn field_dimension(h2: &AbelianGroup, p: u64) -> u64 {
    let r = h2.rank() as u64;
    if p == 0 {
        return r;
    }
    r + h2.invariant_factors().iter().filter(|d| *d % p == 0).count() as u64
}

/// `0` and the primes dividing some invariant factor: every other prime
/// gives the rational dimension.
pub fn relevant_fields(h2: &AbelianGroup) -> Vec<u64> {
    let mut ps: Vec<u64> = h2
        .invariant_factors()
        .iter()
        .flat_map(|d| crate::classify::prime_factors(*d))
        .collect();
    ps.sort_unstable();
    ps.dedup();
    ps.insert(0, 0);
    ps
}

/// `H₂ ∈ {0, Z, Z₂}`.
pub fn elliptic_5m(h2: &AbelianGroup) -> bool {
    matches!((h2.rank(), h2.invariant_factors()), (0, []) | (1, []) | (0, [2]))
}

/// Necessary condition for a simply connected 4-manifold: `b₂ <= 2`.
pub fn rationally_elliptic_4m(b2: u64) -> bool {
    b2 <= 2
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    /// Field label (`"Q"`, `"F2"`, …) to `a`.
    pub a_per_field: BTreeMap<String, u64>,
    pub growth: GrowthKind,
    pub rate: Option<f64>,
    /// `b_0..=b_n` for the largest `a`, as decimal strings.
    pub b_prefix: Vec<String>,
}

pub fn field_label(p: u64) -> String {
    if p == 0 {
        "Q".into()
    } else {
        format!("F{p}")
    }
}

/// Report for the given `a` per field; the growth is that of the worst field.
pub fn growth_report(a_per_field: BTreeMap<String, u64>, n: usize) -> GrowthReport {
    let a = a_per_field.values().copied().max().unwrap_or(0);
    let class = growth_class(a);
    GrowthReport {
        a_per_field,
        growth: class.kind,
        rate: class.rate,
        b_prefix: tor_betti_sequence(a, n).iter().map(ToString::to_string).collect(),
    }
}

pub fn group_growth_report(h2: &AbelianGroup, n: usize) -> GrowthReport {
    let fields = relevant_fields(h2).into_iter().map(|p| (field_label(p), field_dimension(h2, p))).collect();
    growth_report(fields, n)
}

/// `b_n / b_{n-1}` in floating point, from the exact terms.
pub fn ratio(seq: &[BigUint], n: usize) -> f64 {
    if n == 0 || seq[n - 1].is_zero() {
        return f64::NAN;
    }
    // scale both to at most 2^1000 before converting
    let bits = seq[n].bits().saturating_sub(1000);
    let num = &seq[n] >> bits;
    let den = &seq[n - 1] >> bits;
    to_f64(&num) / to_f64(&den)
}

fn to_f64(x: &BigUint) -> f64 {
    x.to_string().parse().unwrap_or(f64::INFINITY)
}
