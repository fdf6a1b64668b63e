use std::collections::BTreeSet;

use minent_core::classify::*;
use minent_core::ellipticity::elliptic_5m;
use proptest::prelude::*;

const TORSION: [u64; 6] = [2, 3, 4, 8, 9, 12];

fn word(s: &str) -> FourManifoldWord {
    s.parse().unwrap()
}

fn group(s: &str) -> AbelianGroup {
    s.parse().unwrap()
}

/// All multisets of size `<= max_len` over `gens`.
fn words(gens: &[Generator], max_len: usize) -> Vec<FourManifoldWord> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![(Vec::new(), 0usize)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (w, start) in &frontier {
            for (k, g) in gens.iter().enumerate().skip(*start) {
                let mut v: Vec<Generator> = w.clone();
                v.push(*g);
                out.push(v.clone());
                next.push((v, k));
            }
        }
        frontier = next;
    }
    out.into_iter().map(FourManifoldWord::new).collect()
}

/// Groups of rank `<= 2` with at most three cyclic summands from `TORSION`.
fn exhaustive_groups() -> Vec<AbelianGroup> {
    let mut seen = BTreeSet::new();
    for rank in 0..=2 {
        let mut orders: Vec<Vec<u64>> = vec![vec![]];
        for _ in 0..3 {
            let grown: Vec<Vec<u64>> =
                orders.iter().flat_map(|o| TORSION.iter().map(move |d| [o.clone(), vec![*d]].concat())).collect();
            orders.extend(grown);
        }
        for o in orders {
            seen.insert(AbelianGroup::from_cyclic(rank, &o).unwrap());
        }
    }
    seen.into_iter().collect()
}

fn indices() -> Vec<BardenIndex> {
    (0..=4).map(BardenIndex::Finite).chain([BardenIndex::Infinite]).collect()
}

/// `H₂` from the block description, independent of the library routine.
fn reconstruct(word: &BardenWord) -> (AbelianGroup, BardenIndex) {
    let mut rank = 0;
    let mut orders = Vec::new();
    let mut i = BardenIndex::Finite(0);
    for b in &word.0 {
        match b {
            BardenBlock::XMinus1 => {
                orders.push(2);
                i = BardenIndex::Finite(1);
            }
            BardenBlock::X(j) => {
                if *j > 0 {
                    orders.extend([1 << j, 1 << j]);
                }
                i = BardenIndex::Finite(*j);
            }
            BardenBlock::XInfinity => {
                rank += 1;
                i = BardenIndex::Infinite;
            }
            BardenBlock::M(k) => orders.extend([*k, *k]),
            BardenBlock::MInfinity => rank += 1,
        }
    }
    (AbelianGroup::from_cyclic(rank, &orders).unwrap(), i)
}

#[test]
fn form_examples() {
    let k3 = form_of_word(&word("K3"));
    assert_eq!((k3.rank(), k3.signature(), k3.parity()), (22, -16, Parity::Even));
    let f = form_of_word(&word("CP2#CP2bar"));
    assert_eq!(f.matrix(), &[vec![1, 0], vec![0, -1]]);
    assert_eq!(f.parity(), Parity::Odd);
    assert_eq!(form_of_word(&word("S4")).rank(), 0);
}

#[test]
fn e8_entries() {
    let e = IntersectionForm::e8();
    let m = e.matrix();
    assert_eq!(m[4][7], 1);
    assert_eq!(m[7][4], 1);
    assert_eq!(m[6][7], 0);
    assert!(e.is_definite() && e.is_unimodular());
    assert_eq!(e.signature() % 8, 0);
}

#[test]
fn homeotype_examples() {
    assert_eq!(homeotype_b2le2(&IntersectionForm::hyperbolic()).unwrap(), "S2xS2");
    assert_eq!(homeotype_b2le2(&IntersectionForm::diagonal(&[1, 1])).unwrap(), "CP2#CP2");
    assert_eq!(homeotype_b2le2(&IntersectionForm::empty()).unwrap(), "S4");
    assert_eq!(homeotype_b2le2(&IntersectionForm::diagonal(&[2])).unwrap(), NOT_IN_LIST);
    assert!(matches!(homeotype_b2le2(&IntersectionForm::diagonal(&[1, 1, 1])), Err(ClassifyError::RankTooLarge(3))));
}

/// Every unimodular symmetric 2x2 form with small entries falls in the list,
/// and the label agrees with a direct oracle on the entries.
#[test]
fn small_unimodular_forms_are_listed() {
    for a in -4i64..=4 {
        for b in -4i64..=4 {
            for c in -4i64..=4 {
                let det = a * c - b * b;
                if det.abs() != 1 {
                    continue;
                }
                let f = IntersectionForm::new(vec![vec![a, b], vec![b, c]]).unwrap();
                let even = a % 2 == 0 && c % 2 == 0;
                let expected = match (det, even) {
                    (-1, true) => "S2xS2",
                    (-1, false) => "CP2#CP2bar",
                    (1, _) => "CP2#CP2",
                    _ => unreachable!(),
                };
                assert_eq!(homeotype_b2le2(&f).unwrap(), expected, "{a} {b} {c}");
            }
        }
    }
}

#[test]
fn even_form_examples() {
    assert_eq!(even_form_realizable(-2, 3), EvenFormVerdict::Realizable { witness: word("K3") });
    assert_eq!(even_form_realizable(1, 100), EvenFormVerdict::RokhlinViolation);
    assert_eq!(even_form_realizable(-4, 5), EvenFormVerdict::OpenUnder118);
    assert_eq!(even_form_realizable(0, 2), EvenFormVerdict::Realizable { witness: word("S2xS2#S2xS2") });
}

#[test]
fn isomorphism_is_restricted() {
    let a = IntersectionForm::diagonal(&[1, -1, -1]);
    let b = IntersectionForm::hyperbolic().direct_sum(&IntersectionForm::diagonal(&[-1]));
    assert!(a.isomorphic(&b).unwrap());
    assert!(!IntersectionForm::hyperbolic().isomorphic(&IntersectionForm::diagonal(&[1, -1])).unwrap());
    assert!(IntersectionForm::e8().isomorphic(&IntersectionForm::diagonal(&[1; 8])).is_ok());
    let big = IntersectionForm::e8().direct_sum(&IntersectionForm::e8());
    assert!(matches!(big.isomorphic(&big), Err(ClassifyError::Unsupported(_))));
}

#[test]
fn theorem_d_examples() {
    assert!(theorem_d_decision(&word("CP2#CP2")).solvable);
    assert!(!theorem_d_decision(&word("K3")).solvable);
    let s4 = theorem_d_decision(&word(""));
    assert!(s4.solvable);
    assert_eq!(s4.witness.as_deref(), Some("S4"));
    assert_eq!(theorem_d_decision(&word("CP2bar#CP2bar")).witness.as_deref(), Some("CP2#CP2"));
    assert_eq!(theorem_d_decision(&word("CP2bar#S4")).witness.as_deref(), Some("CP2"));
}

#[test]
fn barden_examples() {
    assert!(barden_validate(&group("Z2"), BardenIndex::Finite(1)).is_ok());
    assert!(barden_validate(&group("Z3"), BardenIndex::Finite(0)).is_err());
    assert!(barden_validate(&group("Z+Z4+Z4"), BardenIndex::Finite(2)).is_ok());
    let w = |g: &str, i| barden_decompose(&group(g), i).unwrap().to_string();
    assert_eq!(w("Z2", BardenIndex::Finite(1)), "X_-1");
    assert_eq!(w("Z", BardenIndex::Infinite), "X_inf");
    assert_eq!(w("Z+Z2+Z2", BardenIndex::Finite(0)), "M_2 # M_inf");
}

#[test]
fn theorem_e_examples() {
    let d = |g: &str, i| theorem_e_decision(&group(g), i).unwrap();
    assert_eq!(d("0", BardenIndex::Finite(0)).witness.as_deref(), Some("S^5"));
    assert!(!d("Z2+Z2", BardenIndex::Finite(0)).solvable);
    assert_eq!(d("Z", BardenIndex::Infinite).witness.as_deref(), Some("eta_3"));
    assert_eq!(d("Z2", BardenIndex::Finite(1)).witness.as_deref(), Some("SU(3)/SO(3)"));
    assert!(theorem_e_decision(&group("Z3"), BardenIndex::Finite(0)).is_err());
}

#[test]
fn tstructure_examples() {
    let f = |g: &str, i| tstructure_flags(&group(g), i).unwrap();
    assert_eq!(f("Z4+Z4", BardenIndex::Finite(2)).polarized, Flag::Unknown);
    assert_eq!(f("Z2", BardenIndex::Finite(1)).polarized, Flag::Known(true));
    assert_eq!(f("Z", BardenIndex::Finite(0)).polarized, Flag::Known(true));
    assert_eq!(f("Z", BardenIndex::Infinite).polarized, Flag::Known(true));
    assert!(f("Z8+Z8", BardenIndex::Finite(3)).t_structure);
}

#[test]
fn brieskorn_examples() {
    let w = brieskorn_weights([2, 3, 3, 3]).unwrap();
    assert_eq!((w.lcm, w.weights), (6, [3, 2, 2, 2]));
    assert_eq!(brieskorn_weights([2, 2, 2, 2]).unwrap().weights, [1, 1, 1, 1]);
    assert_eq!(brieskorn_weights([2, 3, 5, 7]).unwrap().weights, [105, 70, 42, 30]);
    assert_eq!(brieskorn_weights([4, 4, 6, 6]).unwrap().gcd, 1);
}

#[test]
fn exhaustive_words_have_zero_entropy_and_solve_exactly_when_b2_le_2() {
    for w in words(&Generator::WORD_GENERATORS, 3) {
        let d = theorem_d_decision(&w);
        assert_eq!(d.minimal_entropy, 0.0);
        let b2 = form_of_word(&w).rank();
        assert_eq!(d.solvable, b2 <= 2, "{w}");
        assert_eq!(d.elliptic, b2 <= 2, "{w}");
    }
}

#[test]
fn exhaustive_barden_round_trip_and_decisions() {
    let mut solvable = BTreeSet::new();
    let mut valid = 0;
    for g in exhaustive_groups() {
        for i in indices() {
            if barden_validate(&g, i).is_err() {
                continue;
            }
            valid += 1;
            let word = barden_decompose(&g, i).unwrap();
            assert_eq!(reconstruct(&word), (g.clone(), i), "{word}");
            assert_eq!(word.invariants(), (g.clone(), i));
            let d = theorem_e_decision(&g, i).unwrap();
            assert_eq!(d.minimal_entropy, 0.0);
            assert_eq!(d.solvable, elliptic_5m(&g), "{g} {i}");
            if d.solvable {
                solvable.insert(d.witness.unwrap());
            }
        }
    }
    assert!(valid > 50);
    let expected: BTreeSet<String> = ["S^5", "S^3xS^2", "eta_3", "SU(3)/SO(3)"].map(String::from).into();
    assert_eq!(solvable, expected);
}

fn generator() -> impl Strategy<Value = Generator> {
    proptest::sample::select(vec![
        Generator::S4,
        Generator::CP2,
        Generator::CP2Bar,
        Generator::S2xS2,
        Generator::K3,
        Generator::K3Bar,
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forms_are_additive(
        a in proptest::collection::vec(generator(), 0..4),
        b in proptest::collection::vec(generator(), 0..4),
    ) {
        let (wa, wb) = (FourManifoldWord::new(a.clone()), FourManifoldWord::new(b.clone()));
        let joined = FourManifoldWord::new([a.clone(), b].concat());
        let (fa, fb, fj) = (form_of_word(&wa), form_of_word(&wb), form_of_word(&joined));
        prop_assert_eq!(fj.rank(), fa.rank() + fb.rank());
        prop_assert_eq!(fj.signature(), fa.signature() + fb.signature());
        prop_assert_eq!(fj.determinant(), fa.determinant() * fb.determinant());
        let has_odd = joined.generators().iter().any(|g| matches!(g, Generator::CP2 | Generator::CP2Bar));
        prop_assert_eq!(fj.parity() == Parity::Odd, has_odd);
        if fj.parity() == Parity::Even {
            prop_assert_eq!(fj.signature() % 8, 0);
        }
    }

    #[test]
    fn realizable_witness_round_trips(k in -6i64..=6, l in 0u64..20) {
        if let EvenFormVerdict::Realizable { witness } = even_form_realizable(k, l) {
            let f = form_of_word(&witness);
            let target = IntersectionForm::even(k, l);
            prop_assert_eq!(f.rank(), target.rank());
            prop_assert_eq!(f.signature(), target.signature());
            prop_assert_eq!(f.parity(), target.parity());
            if !target.is_definite() {
                prop_assert!(f.isomorphic(&target).unwrap());
            }
        }
    }
}
