use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{AbelianGroup, ClassifyError};
use crate::ellipticity::elliptic_5m;

/// The invariant `i(M) ∈ {0, 1, 2, …} ∪ {∞}`. `Infinite` compares above
/// every finite value and equal to itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BardenIndex {
    Finite(u32),
    Infinite,
}

impl BardenIndex {
    pub fn is_finite(self) -> bool {
        matches!(self, BardenIndex::Finite(_))
    }

    fn exceeds(self, n: u32) -> bool {
        self.cmp(&BardenIndex::Finite(n)) == Ordering::Greater
    }
}

impl fmt::Display for BardenIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BardenIndex::Finite(n) => write!(f, "{n}"),
            BardenIndex::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for BardenIndex {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" | "oo" => Ok(BardenIndex::Infinite),
            t => t
                .parse()
                .map(BardenIndex::Finite)
                .map_err(|_| ClassifyError::InvalidBarden(format!("index {s:?} is neither a non-negative integer nor inf"))),
        }
    }
}

impl Serialize for BardenIndex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            BardenIndex::Finite(n) => s.serialize_u32(*n),
            BardenIndex::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for BardenIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u32),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(BardenIndex::Finite(n)),
            Raw::S(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Prime 5-manifolds of the connected-sum decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BardenBlock {
    /// The Wu manifold `SU(3)/SO(3)`.
    XMinus1,
    /// `X_j` for `j >= 0`; `X_0 = S⁵`.
    X(u32),
    /// `X_∞`, the non-trivial `S³`-bundle over `S²`.
    XInfinity,
    /// `M_k` for `k >= 2`, with `H₂ = Z_k ⊕ Z_k`.
    M(u64),
    /// `M_∞ = S³ × S²`.
    MInfinity,
}

impl BardenBlock {
    /// Contribution to `H₂`.
    pub fn homology(self) -> AbelianGroup {
        let cyc = |orders: &[u64]| AbelianGroup::from_cyclic(0, orders).expect("positive orders");
        match self {
            BardenBlock::XMinus1 => cyc(&[2]),
            BardenBlock::X(0) => AbelianGroup::trivial(),
            BardenBlock::X(j) => cyc(&[1 << j, 1 << j]),
            BardenBlock::XInfinity | BardenBlock::MInfinity => AbelianGroup::free(1),
            BardenBlock::M(k) => cyc(&[k, k]),
        }
    }
}

impl fmt::Display for BardenBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BardenBlock::XMinus1 => write!(f, "X_-1"),
            BardenBlock::X(j) => write!(f, "X_{j}"),
            BardenBlock::XInfinity => write!(f, "X_inf"),
            BardenBlock::M(k) => write!(f, "M_{k}"),
            BardenBlock::MInfinity => write!(f, "M_inf"),
        }
    }
}

/// `X_j # M_{k_1} # … # M_{k_l}` with `k_1 | k_2 | …`, then `M_∞` copies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BardenWord(pub Vec<BardenBlock>);

impl BardenWord {
    /// `(H₂, i)` read back from the blocks.
    pub fn invariants(&self) -> (AbelianGroup, BardenIndex) {
        let h2 = self.0.iter().fold(AbelianGroup::trivial(), |acc, b| acc.sum(&b.homology()));
        let i = self
            .0
            .iter()
            .find_map(|b| match b {
                BardenBlock::XMinus1 => Some(BardenIndex::Finite(1)),
                BardenBlock::X(j) => Some(BardenIndex::Finite(*j)),
                BardenBlock::XInfinity => Some(BardenIndex::Infinite),
                _ => None,
            })
            .unwrap_or(BardenIndex::Finite(0));
        (h2, i)
    }
}

impl fmt::Display for BardenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" # "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TorsionShape {
    /// `G ⊕ G`.
    Double,
    /// `Z₂ ⊕ G ⊕ G`.
    TwistedDouble,
}

fn torsion_shape(h2: &AbelianGroup) -> Option<(TorsionShape, AbelianGroup)> {
    let t = h2.torsion();
    if let Some(g) = t.torsion_half() {
        return Some((TorsionShape::Double, g));
    }
    let g = t.remove_primary(2, 1, 1)?.torsion_half()?;
    Some((TorsionShape::TwistedDouble, g))
}

/// Checks that `(H₂, i)` are the invariants of a closed simply connected
/// 5-manifold.
pub fn barden_validate(h2: &AbelianGroup, i: BardenIndex) -> Result<(), ClassifyError> {
    let invalid = |why: String| Err(ClassifyError::InvalidBarden(why));
    let Some((shape, _)) = torsion_shape(h2) else {
        return invalid(format!("torsion of {h2} is neither G+G nor Z2+G+G"));
    };
    match (shape, i) {
        (TorsionShape::Double, BardenIndex::Finite(0)) => Ok(()),
        (TorsionShape::Double, BardenIndex::Finite(n)) => {
            if h2.primary_count(2, n) >= 2 {
                Ok(())
            } else {
                invalid(format!("i = {n} needs two Z(2^{n}) summands in {h2}"))
            }
        }
        (TorsionShape::Double, BardenIndex::Infinite) => {
            if h2.rank() >= 1 {
                Ok(())
            } else {
                invalid(format!("i = inf needs a free summand in {h2}"))
            }
        }
        (TorsionShape::TwistedDouble, BardenIndex::Finite(1)) => Ok(()),
        (TorsionShape::TwistedDouble, _) => invalid(format!("torsion of {h2} has the form Z2+G+G, which forces i = 1")),
    }
}

/// Connected-sum decomposition into prime blocks; `X_0` appears only for
/// `S⁵` itself.
pub fn barden_decompose(h2: &AbelianGroup, i: BardenIndex) -> Result<BardenWord, ClassifyError> {
    barden_validate(h2, i)?;
    let (shape, mut g) = torsion_shape(h2).expect("validated");
    let mut rank = h2.rank();
    let lead = match (shape, i) {
        (TorsionShape::TwistedDouble, _) => BardenBlock::XMinus1,
        (_, BardenIndex::Finite(0)) => BardenBlock::X(0),
        (_, BardenIndex::Finite(n)) => {
            g = g.remove_primary(2, n, 1).expect("validated");
            BardenBlock::X(n)
        }
        (_, BardenIndex::Infinite) => {
            rank -= 1;
            BardenBlock::XInfinity
        }
    };
    let mut blocks = Vec::new();
    blocks.extend(g.invariant_factors().iter().map(|k| BardenBlock::M(*k)));
    blocks.extend(std::iter::repeat_n(BardenBlock::MInfinity, rank as usize));
    if lead != BardenBlock::X(0) || blocks.is_empty() {
        blocks.insert(0, lead);
    }
    Ok(BardenWord(blocks))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiveManifoldDecision {
    pub input: String,
    pub barden_word: String,
    pub elliptic: bool,
    pub minimal_entropy: f64,
    pub solvable: bool,
    pub witness: Option<String>,
}

/// Minimal entropy and solvability for a simply connected 5-manifold.
pub fn theorem_e_decision(h2: &AbelianGroup, i: BardenIndex) -> Result<FiveManifoldDecision, ClassifyError> {
    let word = barden_decompose(h2, i)?;
    let witness = match (h2.rank(), h2.invariant_factors(), i) {
        (0, [], BardenIndex::Finite(0)) => Some("S^5"),
        (1, [], BardenIndex::Finite(0)) => Some("S^3xS^2"),
        (1, [], BardenIndex::Infinite) => Some("eta_3"),
        (0, [2], BardenIndex::Finite(1)) => Some("SU(3)/SO(3)"),
        _ => None,
    };
    Ok(FiveManifoldDecision {
        input: format!("H2={h2}, i={i}"),
        barden_word: word.to_string(),
        elliptic: elliptic_5m(h2),
        minimal_entropy: 0.0,
        solvable: witness.is_some(),
        witness: witness.map(str::to_string),
    })
}

/// A boolean that may be undecided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flag {
    Known(bool),
    Unknown,
}

impl Serialize for Flag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Flag::Known(b) => s.serialize_bool(*b),
            Flag::Unknown => s.serialize_str("unknown"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TStructureFlags {
    pub t_structure: bool,
    pub polarized: Flag,
    pub minvol_zero: Flag,
    pub spin: bool,
    pub bounds: bool,
}

/// Existence of a T-structure and of a polarized one. Non-spin manifolds
/// that bound and have `1 < i < ∞` are undecided.
pub fn tstructure_flags(h2: &AbelianGroup, i: BardenIndex) -> Result<TStructureFlags, ClassifyError> {
    barden_validate(h2, i)?;
    let (shape, _) = torsion_shape(h2).expect("validated");
    let bounds = shape == TorsionShape::Double;
    let spin = i == BardenIndex::Finite(0);
    let open = bounds && !spin && i.exceeds(1) && i.is_finite();
    let flag = if open { Flag::Unknown } else { Flag::Known(true) };
    Ok(TStructureFlags { t_structure: true, polarized: flag, minvol_zero: flag, spin, bounds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> AbelianGroup {
        s.parse().unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(barden_validate(&g("Z2"), BardenIndex::Finite(1)).is_ok());
        assert!(barden_validate(&g("Z3"), BardenIndex::Finite(0)).is_err());
        assert!(barden_validate(&g("Z+Z4+Z4"), BardenIndex::Finite(2)).is_ok());
        assert!(barden_validate(&g("Z4+Z4"), BardenIndex::Finite(1)).is_err());
        assert!(barden_validate(&g("0"), BardenIndex::Infinite).is_err());
    }

    #[test]
    fn decompositions() {
        let w = |s: &str, i| barden_decompose(&g(s), i).unwrap().to_string();
        assert_eq!(w("Z2", BardenIndex::Finite(1)), "X_-1");
        assert_eq!(w("Z", BardenIndex::Infinite), "X_inf");
        assert_eq!(w("Z+Z2+Z2", BardenIndex::Finite(0)), "M_2 # M_inf");
        assert_eq!(w("0", BardenIndex::Finite(0)), "X_0");
        assert_eq!(w("Z4+Z4+Z3+Z3", BardenIndex::Finite(2)), "X_2 # M_3");
    }

    #[test]
    fn infinity_ordering() {
        assert!(BardenIndex::Infinite > BardenIndex::Finite(1));
        assert!(BardenIndex::Infinite.cmp(&BardenIndex::Infinite) == Ordering::Equal);
        assert_eq!("inf".parse::<BardenIndex>().unwrap(), BardenIndex::Infinite);
        assert_eq!(serde_json::to_string(&BardenIndex::Finite(3)).unwrap(), "3");
    }

    #[test]
    fn flags() {
        let f = tstructure_flags(&g("Z4+Z4"), BardenIndex::Finite(2)).unwrap();
        assert_eq!(f.polarized, Flag::Unknown);
        assert_eq!(tstructure_flags(&g("Z2"), BardenIndex::Finite(1)).unwrap().polarized, Flag::Known(true));
        assert_eq!(serde_json::to_value(Flag::Unknown).unwrap(), serde_json::json!("unknown"));
    }
}
