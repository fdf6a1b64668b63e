use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::ClassifyError;

/// A finitely generated abelian group `Z^rank ⊕ Z_{d_1} ⊕ … ⊕ Z_{d_m}` with
/// `d_1 | d_2 | … | d_m` and every `d_i >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbelianGroup {
    rank: u32,
    factors: Vec<u64>,
}

impl AbelianGroup {
    /// From invariant factors; fails unless they form a divisibility chain of
    /// integers `>= 2`.
    pub fn new(rank: u32, factors: Vec<u64>) -> Result<Self, ClassifyError> {
        if factors.iter().any(|d| *d < 2) {
            return Err(ClassifyError::InvalidGroup(format!("invariant factors must be >= 2, got {factors:?}")));
        }
        if factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(ClassifyError::InvalidGroup(format!("{factors:?} is not a divisibility chain")));
        }
        Ok(Self { rank, factors })
    }

    pub fn trivial() -> Self {
        Self { rank: 0, factors: Vec::new() }
    }

    pub fn free(rank: u32) -> Self {
        Self { rank, factors: Vec::new() }
    }

    /// From arbitrary cyclic summands `Z_{n}` (orders `n >= 1`), normalized to
    /// invariant factors.
    pub fn from_cyclic(rank: u32, orders: &[u64]) -> Result<Self, ClassifyError> {
        if orders.contains(&0) {
            return Err(ClassifyError::InvalidGroup("cyclic orders must be positive".into()));
        }
        let mut primary: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &n in orders {
            for (p, e) in factorize(n) {
                primary.entry(p).or_default().push(e);
            }
        }
        Ok(Self::from_primary(rank, &primary))
    }

    fn from_primary(rank: u32, primary: &BTreeMap<u64, Vec<u32>>) -> Self {
        let len = primary.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; len];
        for (p, exps) in primary {
            let mut e = exps.clone();
            e.sort_unstable();
            // largest powers go to the last invariant factors
            for (k, ex) in e.iter().rev().enumerate() {
                factors[len - 1 - k] *= p.pow(*ex);
            }
        }
        factors.retain(|d| *d > 1);
        Self { rank, factors }
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn torsion(&self) -> AbelianGroup {
        Self { rank: 0, factors: self.factors.clone() }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.factors.is_empty()
    }

    /// Prime-power exponents of each `p`-primary part.
    pub fn primary(&self) -> BTreeMap<u64, Vec<u32>> {
        let mut out: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &d in &self.factors {
            for (p, e) in factorize(d) {
                out.entry(p).or_default().push(e);
            }
        }
        for v in out.values_mut() {
            v.sort_unstable();
        }
        out
    }

    /// Number of cyclic summands of order exactly `p^e` in the primary
    /// decomposition.
    pub fn primary_count(&self, p: u64, e: u32) -> usize {
        self.primary().get(&p).map_or(0, |v| v.iter().filter(|x| **x == e).count())
    }

    /// `G` with `torsion ≅ G ⊕ G`, if it exists.
    pub fn torsion_half(&self) -> Option<AbelianGroup> {
        let mut half = BTreeMap::new();
        for (p, exps) in self.primary() {
            let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
            for e in exps {
                *counts.entry(e).or_default() += 1;
            }
            if counts.values().any(|c| c % 2 != 0) {
                return None;
            }
            let v: Vec<u32> = counts.iter().flat_map(|(e, c)| std::iter::repeat_n(*e, c / 2)).collect();
            half.insert(p, v);
        }
        Some(Self::from_primary(0, &half))
    }

    /// Direct sum.
    pub fn sum(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut orders = self.factors.clone();
        orders.extend_from_slice(&other.factors);
        Self::from_cyclic(self.rank + other.rank, &orders).expect("orders are positive")
    }

    /// Removes one cyclic summand `Z_n` of the primary decomposition, where
    /// `n` is a prime power.
    pub(crate) fn remove_primary(&self, p: u64, e: u32, copies: usize) -> Option<AbelianGroup> {
        let mut prim = self.primary();
        let v = prim.get_mut(&p)?;
        for _ in 0..copies {
            let pos = v.iter().position(|x| *x == e)?;
            v.remove(pos);
        }
        Some(Self::from_primary(self.rank, &prim))
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.factors.iter().map(|d| format!("Z{d}")));
        write!(f, "{}", parts.join("+"))
    }
}

/// Accepts `0`, or summands joined by `+` (or `⊕`): `Z`, `Z^k`, `Zn`,
/// `Z_n`, `Z/n`, `Zn^k`. Cyclic summands may be given in any order.
impl FromStr for AbelianGroup {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(ClassifyError::InvalidGroup("empty group".into()));
        }
        if s == "0" {
            return Ok(Self::trivial());
        }
        let mut rank = 0u32;
        let mut orders = Vec::new();
        for term in s.split(['+', '⊕']) {
            let bad = || ClassifyError::InvalidGroup(format!("cannot parse summand {term:?}"));
            let rest = term.strip_prefix('Z').ok_or_else(bad)?;
            let (body, copies) = match rest.split_once('^') {
                Some((b, k)) => (b, k.parse::<u32>().map_err(|_| bad())?),
                None => (rest, 1),
            };
            let body = body.trim_start_matches(['_', '/']);
            if body.is_empty() {
                rank += copies;
            } else {
                let n: u64 = body.parse().map_err(|_| bad())?;
                if n == 0 {
                    rank += copies;
                } else {
                    orders.extend(std::iter::repeat_n(n, copies as usize));
                }
            }
        }
        Self::from_cyclic(rank, &orders)
    }
}

/// Prime factorization by trial division.
pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub(crate) fn lcm_all(values: &[u64]) -> u64 {
    values.iter().fold(1u64, |acc, v| acc.lcm(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_normalize() {
        let g: AbelianGroup = "Z2+Z3".parse().unwrap();
        assert_eq!(g.invariant_factors(), &[6]);
        let g: AbelianGroup = "Z + Z4 + Z_4".parse().unwrap();
        assert_eq!((g.rank(), g.invariant_factors()), (1, &[4u64, 4][..]));
        assert_eq!(g.to_string(), "Z+Z4+Z4");
        assert_eq!("Z^2+Z2^3".parse::<AbelianGroup>().unwrap().to_string(), "Z^2+Z2+Z2+Z2");
        assert!("0".parse::<AbelianGroup>().unwrap().is_trivial());
        assert!("Q".parse::<AbelianGroup>().is_err());
        assert!(AbelianGroup::new(0, vec![2, 3]).is_err());
        assert!(AbelianGroup::new(0, vec![1]).is_err());
    }

    #[test]
    fn halves() {
        let g: AbelianGroup = "Z4+Z4+Z3+Z3".parse().unwrap();
        assert_eq!(g.torsion_half().unwrap().invariant_factors(), &[12]);
        assert!("Z2".parse::<AbelianGroup>().unwrap().torsion_half().is_none());
        assert!(AbelianGroup::trivial().torsion_half().unwrap().is_trivial());
    }
}
