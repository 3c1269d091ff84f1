//! Property suites over randomized formulas, cirquents and rule
//! applications.

use proptest::prelude::*;

use cirquent::cirquent::{parse_cirquent, Cirquent, Group, Sequent};
use cirquent::formula::{parse, Atom, Formula, Substitution};
use cirquent::inference::{apply, backward_premises, check_proof, RuleFamily, System};
use cirquent::semantics::{
    binarity, eval_cirquent, eval_cirquent_in_situation, is_tautology, normalize_binary,
    Binarity, Model, Situation,
};
use cirquent::Caps;

fn atom_strategy() -> impl Strategy<Value = Atom> {
    prop_oneof![
        Just(Atom::general("P")),
        Just(Atom::general("Q")),
        Just(Atom::elementary("p")),
        Just(Atom::elementary("q")),
        Just(Atom::logical_true()),
        Just(Atom::logical_false()),
    ]
}

fn literal_strategy() -> impl Strategy<Value = Formula> {
    (atom_strategy(), any::<bool>()).prop_map(|(atom, neg)| {
        if neg && !atom.is_logical() {
            Formula::neg_lit(atom)
        } else {
            Formula::lit(atom)
        }
    })
}

fn formula_strategy() -> impl Strategy<Value = Formula> {
    literal_strategy().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::conj(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::disj(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::chconj(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::chdisj(a, b)),
        ]
    })
}

fn classical_formula_strategy() -> impl Strategy<Value = Formula> {
    formula_strategy().prop_filter("classical", Formula::is_classical)
}

fn cirquent_strategy() -> impl Strategy<Value = Cirquent> {
    (
        prop::collection::vec(formula_strategy(), 0..4),
        prop::collection::vec(prop::collection::vec(any::<bool>(), 4), 0..4),
    )
        .prop_map(|(pool, masks)| {
            let structure: Vec<Group> = masks
                .into_iter()
                .map(|mask| {
                    (1..=pool.len()).filter(|&i| mask[i - 1]).collect::<Group>()
                })
                .collect();
            Cirquent::new(pool, structure).unwrap()
        })
}

fn model_for(c: &Cirquent, seed: &[bool]) -> Model {
    let mut m = Model::new();
    for (k, atom) in c.atoms().into_iter().enumerate() {
        if !atom.is_logical() {
            m.set(atom, seed.get(k % seed.len().max(1)).copied().unwrap_or(false));
        }
    }
    m
}

proptest! {
    #[test]
    fn print_parse_round_trip(f in formula_strategy()) {
        prop_assert_eq!(parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn negate_is_an_involution(f in formula_strategy()) {
        prop_assert_eq!(f.negate().negate(), f);
    }

    #[test]
    fn negation_flips_truth(f in classical_formula_strategy(), seed in prop::collection::vec(any::<bool>(), 4)) {
        let c = Cirquent::singleton(f.clone());
        let m = model_for(&c, &seed);
        let value = cirquent::semantics::eval_formula(&f, &m).unwrap();
        prop_assert_eq!(cirquent::semantics::eval_formula(&f.negate(), &m).unwrap(), !value);
    }

    #[test]
    fn substitution_composes(
        f in formula_strategy(),
        img1 in prop::collection::vec(formula_strategy(), 2),
        img2 in prop::collection::vec(formula_strategy(), 2),
    ) {
        let atoms = [Atom::general("P"), Atom::general("Q")];
        let mut s1 = Substitution::new();
        let mut s2 = Substitution::new();
        for (k, atom) in atoms.iter().enumerate() {
            s1.bind(atom.clone(), img1[k].clone());
            s2.bind(atom.clone(), img2[k].clone());
        }
        let mut composed = Substitution::new();
        for atom in &atoms {
            composed.bind(atom.clone(), s2.apply(&s1.apply(&Formula::lit(atom.clone()))));
        }
        prop_assert_eq!(s2.apply(&s1.apply(&f)), composed.apply(&f));
    }

    #[test]
    fn cirquent_text_round_trip(c in cirquent_strategy()) {
        prop_assert_eq!(parse_cirquent(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn sequent_embeddings_are_primitive(fs in prop::collection::vec(formula_strategy(), 1..5)) {
        let s = Sequent::new(fs).unwrap();
        prop_assert!(Cirquent::from_sequent(&s).is_primitive());
    }

    #[test]
    fn models_are_special_situations(c in cirquent_strategy(), seed in prop::collection::vec(any::<bool>(), 4)) {
        if !c.pool().iter().all(Formula::is_classical) {
            return Ok(());
        }
        let m = model_for(&c, &seed);
        if let Ok(by_model) = eval_cirquent(&c, &m) {
            // the situation that gives every oatom its model value
            let bits: Vec<bool> = c
                .oliterals()
                .iter()
                .map(|(_, _, _, atom)| match atom.sort {
                    cirquent::formula::AtomSort::LogicalTrue => true,
                    cirquent::formula::AtomSort::LogicalFalse => false,
                    _ => m.value(atom).unwrap(),
                })
                .collect();
            prop_assert_eq!(eval_cirquent_in_situation(&c, &Situation(bits)).unwrap(), by_model);
        }
    }

    #[test]
    fn backward_premises_replay(c in cirquent_strategy()) {
        let system = System::ccc();
        for family in [
            RuleFamily::Axiom,
            RuleFamily::Mix,
            RuleFamily::Exchange,
            RuleFamily::Weakening,
            RuleFamily::Duplication,
            RuleFamily::Contraction,
            RuleFamily::DisjIntro,
            RuleFamily::ConjIntro,
        ] {
            for (rule, premises) in backward_premises(&c, family, &system) {
                prop_assert_eq!(apply(&rule, &premises).unwrap(), c.clone(), "{:?}", family);
            }
        }
    }

    #[test]
    fn normalization_instantiates_back(c in cirquent_strategy()) {
        if binarity(&c) == Binarity::Binary {
            let (d, sub) = normalize_binary(&c).unwrap();
            prop_assert_eq!(binarity(&d), Binarity::NormalBinary);
            prop_assert_eq!(d.apply_substitution(&sub), c);
        }
    }

    #[test]
    fn ccc_proofs_check(f in classical_formula_strategy()) {
        let caps = Caps::default();
        if f.atoms().iter().any(Atom::is_logical) {
            return Ok(());
        }
        let c = Cirquent::singleton(f);
        if let Some(p) = cirquent::decide::prove_ccc(&c, &caps).unwrap() {
            prop_assert_eq!(&p.conclusion, &c);
            prop_assert!(check_proof(&p, &System::ccc()).is_ok());
            prop_assert!(is_tautology(&c, &caps).unwrap());
        }
    }
}
