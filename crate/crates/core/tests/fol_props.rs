use std::collections::BTreeSet;

use mfm_fol::fol::{unify, Atom, Formula, Substitution, Term};
use proptest::prelude::*;

fn term() -> impl Strategy<Value = Term> {
    prop_oneof![
        prop::sample::select(vec!["A", "B", "Faucet1"]).prop_map(|c| Term::Constant(c.into())),
        prop::sample::select(vec!["x", "y", "z"]).prop_map(|v| Term::Variable(v.into())),
    ]
}

fn atom() -> impl Strategy<Value = Atom> {
    (prop::sample::select(vec!["p", "q"]), prop::collection::vec(term(), 0..=3))
        .prop_map(|(p, args)| Atom::new(p, args).unwrap())
}

fn formula() -> impl Strategy<Value = Formula> {
    atom().prop_map(Formula::Atomic).prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Or(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Implies(Box::new(a), Box::new(b))),
            inner.prop_map(|a| Formula::Not(Box::new(a))),
        ]
    })
}

fn grounding() -> impl Strategy<Value = Substitution> {
    prop::collection::vec(prop::sample::select(vec!["A", "B", "Faucet1"]), 3).prop_map(|cs| {
        Substitution::from_pairs(["x", "y", "z"].into_iter().zip(cs.into_iter().map(|c| Term::Constant(c.into())))).unwrap()
    })
}

fn vars(a: &Atom, b: &Atom) -> BTreeSet<String> {
    a.variables().chain(b.variables()).map(String::from).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn unifier_equalises(a in atom(), b in atom()) {
        if let Some(s) = unify(&a, &b) {
            prop_assert_eq!(a.apply(&s), b.apply(&s));
        }
    }

    #[test]
    fn unifier_is_most_general(a in atom(), b in atom(), g in grounding()) {
        if a.apply(&g) == b.apply(&g) {
            let s = unify(&a, &b).expect("a unifier exists, so unify must succeed");
            for v in vars(&a, &b) {
                let x = Term::Variable(v);
                prop_assert_eq!(g.apply_term(&s.apply_term(&x)), g.apply_term(&x));
            }
        }
    }

    #[test]
    fn unifier_is_idempotent(a in atom(), b in atom()) {
        if let Some(s) = unify(&a, &b) {
            let once = a.apply(&s);
            prop_assert_eq!(once.apply(&s), once);
            for (v, t) in s.iter() {
                prop_assert!(!t.is_ground() || s.apply_term(t) == *t, "{v}");
                prop_assert_eq!(s.apply_term(&s.apply_term(&Term::Variable(v.to_string()))), s.apply_term(&Term::Variable(v.to_string())));
            }
        }
    }

    #[test]
    fn unify_is_symmetric_in_success(a in atom(), b in atom()) {
        prop_assert_eq!(unify(&a, &b).is_some(), unify(&b, &a).is_some());
    }

    #[test]
    fn term_text_round_trips(t in term()) {
        prop_assert_eq!(Term::parse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn atom_text_round_trips(a in atom()) {
        prop_assert_eq!(Atom::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn formula_text_round_trips(f in formula()) {
        prop_assert_eq!(Formula::parse(&f.to_string()).unwrap(), f);
    }
}
