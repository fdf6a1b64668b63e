use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::ClassifyError;

/// The hyperbolic plane.
pub const H: [[i64; 2]; 2] = [[0, 1], [1, 0]];

/// The even unimodular positive definite form of rank 8.
pub const E8: [[i64; 8]; 8] = [
    [2, 1, 0, 0, 0, 0, 0, 0],
    [1, 2, 1, 0, 0, 0, 0, 0],
    [0, 1, 2, 1, 0, 0, 0, 0],
    [0, 0, 1, 2, 1, 0, 0, 0],
    [0, 0, 0, 1, 2, 1, 0, 1],
    [0, 0, 0, 0, 1, 2, 1, 0],
    [0, 0, 0, 0, 0, 1, 2, 0],
    [0, 0, 0, 0, 1, 0, 0, 2],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Symmetric integer bilinear form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionForm {
    matrix: Vec<Vec<i64>>,
}

impl IntersectionForm {
    pub fn new(matrix: Vec<Vec<i64>>) -> Result<Self, ClassifyError> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return Err(ClassifyError::InvalidForm("matrix is not square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if matrix[i][j] != matrix[j][i] {
                    return Err(ClassifyError::InvalidForm(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { matrix })
    }

    pub fn empty() -> Self {
        Self { matrix: Vec::new() }
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        let matrix = (0..n).map(|i| (0..n).map(|j| if i == j { entries[i] } else { 0 }).collect()).collect();
        Self { matrix }
    }

    pub fn hyperbolic() -> Self {
        Self { matrix: H.iter().map(|r| r.to_vec()).collect() }
    }

    pub fn e8() -> Self {
        Self { matrix: E8.iter().map(|r| r.to_vec()).collect() }
    }

    /// `k E8 ⊕ l H`, with `|k|` copies of `±E8`.
    pub fn even(k: i64, l: u64) -> Self {
        let e = if k < 0 { Self::e8().negated() } else { Self::e8() };
        let mut out = Self::empty();
        for _ in 0..k.unsigned_abs() {
            out = out.direct_sum(&e);
        }
        for _ in 0..l {
            out = out.direct_sum(&Self::hyperbolic());
        }
        out
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn negated(&self) -> Self {
        Self { matrix: self.matrix.iter().map(|r| r.iter().map(|v| -v).collect()).collect() }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.rank(), other.rank());
        let mut m = vec![vec![0; a + b]; a + b];
        for i in 0..a {
            m[i][..a].copy_from_slice(&self.matrix[i]);
        }
        for i in 0..b {
            m[a + i][a..].copy_from_slice(&other.matrix[i]);
        }
        Self { matrix: m }
    }

    /// Even iff every diagonal entry is even.
    pub fn parity(&self) -> Parity {
        if (0..self.rank()).all(|i| self.matrix[i][i] % 2 == 0) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Exact determinant by fraction-free elimination.
    pub fn determinant(&self) -> BigInt {
        let n = self.rank();
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = self.matrix.iter().map(|r| r.iter().map(|v| BigInt::from(*v)).collect()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs().is_one()
    }

    /// `(positive, negative, zero)` eigenvalue counts, exactly, by
    /// congruence diagonalization over the rationals.
    pub fn inertia(&self) -> (usize, usize, usize) {
        let n = self.rank();
        let mut a: Vec<Vec<BigRational>> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|v| BigRational::from_integer(BigInt::from(*v))).collect())
            .collect();
        let (mut pos, mut neg, mut zero) = (0, 0, 0);
        let mut alive: Vec<usize> = (0..n).collect();
        while !alive.is_empty() {
            let pivot = alive.iter().copied().find(|&i| !a[i][i].is_zero());
            let p = match pivot {
                Some(p) => p,
                None => {
                    // all remaining diagonal entries vanish: add row/col j to i
                    let pair = alive
                        .iter()
                        .flat_map(|&i| alive.iter().map(move |&j| (i, j)))
                        .find(|&(i, j)| i != j && !a[i][j].is_zero());
                    match pair {
                        Some((i, j)) => {
                            for k in 0..n {
                                let v = a[j][k].clone();
                                a[i][k] += v;
                            }
                            for k in 0..n {
                                let v = a[k][j].clone();
                                a[k][i] += v;
                            }
                            i
                        }
                        None => {
                            zero += alive.len();
                            break;
                        }
                    }
                }
            };
            let d = a[p][p].clone();
            if d.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            alive.retain(|&i| i != p);
            for &i in &alive {
                let f = &a[i][p] / &d;
                if f.is_zero() {
                    continue;
                }
                for &j in &alive {
                    let v = &f * &a[p][j];
                    a[i][j] -= v;
                }
                a[i][p] = BigRational::zero();
                a[p][i] = BigRational::zero();
            }
        }
        (pos, neg, zero)
    }

    pub fn signature(&self) -> i64 {
        let (p, n, _) = self.inertia();
        p as i64 - n as i64
    }

    pub fn is_definite(&self) -> bool {
        let (p, n, z) = self.inertia();
        z == 0 && (p == 0 || n == 0)
    }

    /// Isomorphism of unimodular forms by `(rank, signature, parity)`.
    ///
    /// Complete for indefinite forms and for definite forms of rank `<= 8`
    /// (sums of `(±1)` or `±E8`); larger definite forms are unsupported.
    pub fn isomorphic(&self, other: &Self) -> Result<bool, ClassifyError> {
        if !self.is_unimodular() || !other.is_unimodular() {
            return Err(ClassifyError::Unsupported("isomorphism of non-unimodular forms".into()));
        }
        for f in [self, other] {
            if f.rank() > 8 && f.is_definite() {
                return Err(ClassifyError::Unsupported(format!("definite form of rank {}", f.rank())));
            }
        }
        Ok(self.rank() == other.rank() && self.signature() == other.signature() && self.parity() == other.parity())
    }
}

/// Building blocks of the four-dimensional words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    S4,
    CP2,
    /// `CP²` with reversed orientation.
    CP2Bar,
    S2xS2,
    K3,
    /// `K3` with reversed orientation.
    K3Bar,
}

impl Generator {
    /// The generators of the connected-sum words classified here.
    pub const WORD_GENERATORS: [Generator; 5] = [Generator::S4, Generator::CP2, Generator::CP2Bar, Generator::S2xS2, Generator::K3];

    pub fn form(self) -> IntersectionForm {
        match self {
            Generator::S4 => IntersectionForm::empty(),
            Generator::CP2 => IntersectionForm::diagonal(&[1]),
            Generator::CP2Bar => IntersectionForm::diagonal(&[-1]),
            Generator::S2xS2 => IntersectionForm::hyperbolic(),
            Generator::K3 => IntersectionForm::even(-2, 3),
            Generator::K3Bar => IntersectionForm::even(-2, 3).negated(),
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Generator::CP2 => Generator::CP2Bar,
            Generator::CP2Bar => Generator::CP2,
            Generator::K3 => Generator::K3Bar,
            Generator::K3Bar => Generator::K3,
            g => g,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Generator::S4 => "S4",
            Generator::CP2 => "CP2",
            Generator::CP2Bar => "CP2bar",
            Generator::S2xS2 => "S2xS2",
            Generator::K3 => "K3",
            Generator::K3Bar => "K3bar",
        }
    }
}

impl FromStr for Generator {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace(['^', '_'], "").as_str() {
            "s4" => Ok(Generator::S4),
            "cp2" => Ok(Generator::CP2),
            "cp2bar" | "-cp2" | "cp2~" | "cpbar2" => Ok(Generator::CP2Bar),
            "s2xs2" | "s2*s2" => Ok(Generator::S2xS2),
            "k3" => Ok(Generator::K3),
            "k3bar" | "-k3" | "k3~" => Ok(Generator::K3Bar),
            other => Err(ClassifyError::InvalidWord(format!("unknown generator {other:?}"))),
        }
    }
}

/// A connected sum, as a multiset of generators (kept sorted).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FourManifoldWord(Vec<Generator>);

impl FourManifoldWord {
    pub fn new(mut gens: Vec<Generator>) -> Self {
        gens.sort();
        Self(gens)
    }

    pub fn generators(&self) -> &[Generator] {
        &self.0
    }

    /// Drops `S4` summands.
    pub fn reduced(&self) -> Self {
        Self(self.0.iter().copied().filter(|g| *g != Generator::S4).collect())
    }

    pub fn reversed(&self) -> Self {
        Self::new(self.0.iter().map(|g| g.reversed()).collect())
    }

    pub fn count(&self, g: Generator) -> usize {
        self.0.iter().filter(|x| **x == g).count()
    }
}

impl fmt::Display for FourManifoldWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "S4");
        }
        let parts: Vec<&str> = self.0.iter().map(|g| g.label()).collect();
        write!(f, "{}", parts.join("#"))
    }
}

/// Generators joined by `#`, `,` or `+`; the empty word is `S4`.
impl FromStr for FourManifoldWord {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        if s.trim().is_empty() {
            return Ok(Self::new(Vec::new()));
        }
        let gens = s.split(['#', ',', '+']).map(str::parse).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(gens))
    }
}

/// Direct sum of the generators' forms.
pub fn form_of_word(word: &FourManifoldWord) -> IntersectionForm {
    word.0.iter().fold(IntersectionForm::empty(), |acc, g| acc.direct_sum(&g.form()))
}

pub const NOT_IN_LIST: &str = "rank-≤2 form not in list";

/// Homeomorphism type of a form of rank at most two, up to orientation.
pub fn homeotype_b2le2(form: &IntersectionForm) -> Result<&'static str, ClassifyError> {
    if form.rank() > 2 {
        return Err(ClassifyError::RankTooLarge(form.rank()));
    }
    if !form.is_unimodular() {
        return Ok(NOT_IN_LIST);
    }
    Ok(match (form.rank(), form.signature().abs(), form.parity()) {
        (0, _, _) => "S4",
        (1, _, _) => "CP2",
        (2, 0, Parity::Even) => "S2xS2",
        (2, 0, Parity::Odd) => "CP2#CP2bar",
        (2, 2, Parity::Odd) => "CP2#CP2",
        _ => NOT_IN_LIST,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EvenFormVerdict {
    Realizable { witness: FourManifoldWord },
    RokhlinViolation,
    #[serde(rename = "open_under_11_8")]
    OpenUnder118,
}

/// Whether `k E8 + l H` is the form of a smooth simply connected 4-manifold
/// built from `K3`, reversed `K3` and `S2xS2`.
pub fn even_form_realizable(k: i64, l: u64) -> EvenFormVerdict {
    if k % 2 != 0 {
        return EvenFormVerdict::RokhlinViolation;
    }
    let copies = k.unsigned_abs() / 2;
    let needed = 3 * copies;
    if l < needed {
        return EvenFormVerdict::OpenUnder118;
    }
    let k3 = if k < 0 { Generator::K3 } else { Generator::K3Bar };
    let mut gens = vec![k3; copies as usize];
    gens.extend(std::iter::repeat_n(Generator::S2xS2, (l - needed) as usize));
    EvenFormVerdict::Realizable { witness: FourManifoldWord::new(gens) }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourManifoldDecision {
    pub input: String,
    pub homeotype: Option<String>,
    pub elliptic: bool,
    pub minimal_entropy: f64,
    pub solvable: bool,
    pub witness: Option<String>,
}

/// Minimal entropy and solvability for connected sums of the `WORD_GENERATORS`
/// generators (plus reversed `K3`); the `S4`-reduced word is compared up to
/// global orientation reversal.
pub fn theorem_d_decision(word: &FourManifoldWord) -> FourManifoldDecision {
    use Generator::*;
    let r = word.reduced();
    let solvable_words: [&[Generator]; 5] = [&[], &[CP2], &[S2xS2], &[CP2, CP2Bar], &[CP2, CP2]];
    let witness = solvable_words
        .iter()
        .zip(["S4", "CP2", "S2xS2", "CP2#CP2bar", "CP2#CP2"])
        .find(|(w, _)| {
            let w = FourManifoldWord::new(w.to_vec());
            r == w || r.reversed() == w
        })
        .map(|(_, l)| l.to_string());
    let form = form_of_word(word);
    let homeotype = if form.rank() <= 2 { homeotype_b2le2(&form).ok().map(str::to_string) } else { None };
    FourManifoldDecision {
        input: word.to_string(),
        homeotype,
        elliptic: crate::ellipticity::rationally_elliptic_4m(form.rank() as u64),
        minimal_entropy: 0.0,
        solvable: witness.is_some(),
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e8_is_even_unimodular_definite() {
        let e = IntersectionForm::e8();
        assert_eq!(e.determinant(), BigInt::one());
        assert_eq!(e.inertia(), (8, 0, 0));
        assert_eq!(e.parity(), Parity::Even);
    }

    #[test]
    fn k3_form() {
        let f = form_of_word(&"K3".parse().unwrap());
        assert_eq!((f.rank(), f.signature(), f.parity()), (22, -16, Parity::Even));
        assert_eq!(f.determinant().abs(), BigInt::one());
    }

    #[test]
    fn hyperbolic_inertia_needs_off_diagonal_pivot() {
        assert_eq!(IntersectionForm::hyperbolic().inertia(), (1, 1, 0));
        assert_eq!(IntersectionForm::new(vec![vec![0, 0], vec![0, 0]]).unwrap().inertia(), (0, 0, 2));
    }

    #[test]
    fn words_parse() {
        let w: FourManifoldWord = "CP2 # CP2bar".parse().unwrap();
        assert_eq!(w.generators(), &[Generator::CP2, Generator::CP2Bar]);
        assert_eq!("".parse::<FourManifoldWord>().unwrap().to_string(), "S4");
        assert!("RP4".parse::<FourManifoldWord>().is_err());
    }
}
