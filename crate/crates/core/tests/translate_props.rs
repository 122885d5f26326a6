use std::collections::BTreeSet;

use mfm_fol::fol::Atom;
use mfm_fol::model::{Edge, MfmModel, Vertex};
use mfm_fol::translate::{translate_edge, translate_model, translate_vertex};
use proptest::prelude::*;

const FUNCTIONS: [&str; 6] = ["source", "transport", "sink", "storage", "balance", "barrier"];

fn model() -> impl Strategy<Value = MfmModel> {
    (1usize..=8)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(
                    (prop::sample::select(FUNCTIONS.to_vec()), prop::option::of(prop::sample::select(vec!["High", "Low", "No"]))),
                    n,
                ),
                prop::collection::btree_map(
                    (0..n, 0..n),
                    (prop::sample::select(vec!["influencer", "participant"]), any::<bool>()),
                    0..=n * 2,
                ),
            )
        })
        .prop_map(|(vs, es)| {
            let mut m = MfmModel::new("Random");
            for (i, (f, s)) in vs.iter().enumerate() {
                m.add_vertex(Vertex::new(&format!("V{i}"), f, *s).unwrap()).unwrap();
            }
            for ((a, b), (r, flow)) in es {
                if a != b {
                    m.add_edge(Edge::new(&format!("V{a}"), &format!("V{b}"), r, flow).unwrap()).unwrap();
                }
            }
            m
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn every_element_is_represented(m in model()) {
        let facts = translate_model(&m).unwrap();
        for v in &m.vertices {
            prop_assert!(facts.contains(&Atom::from_names(v.function.as_str(), &[&v.name])));
            match &v.state {
                Some(s) => prop_assert_eq!(facts.state_of(&v.name), Some(s.as_str())),
                None => prop_assert_eq!(facts.state_of(&v.name), None),
            }
            prop_assert!(translate_vertex(v).iter().all(|a| facts.contains(a)));
        }
        for e in &m.edges {
            prop_assert!(facts.contains(&Atom::from_names(e.relation.as_str(), &[&e.from, &e.to])));
            prop_assert_eq!(facts.contains(&Atom::from_names("flow", &[&e.from, &e.to])), e.carries_flow);
            prop_assert!(translate_edge(e).iter().all(|a| facts.contains(a)));
        }
    }

    #[test]
    fn nothing_else_is_produced(m in model()) {
        let facts = translate_model(&m).unwrap();
        let stated = m.vertices.iter().filter(|v| v.state.is_some()).count();
        let flowing = m.edges.iter().filter(|e| e.carries_flow).count();
        prop_assert_eq!(facts.len(), m.vertices.len() + stated + m.edges.len() + flowing);
        let expected: BTreeSet<Atom> = m
            .vertices
            .iter()
            .flat_map(translate_vertex)
            .chain(m.edges.iter().flat_map(translate_edge))
            .collect();
        prop_assert_eq!(facts.atoms(), &expected);
    }

    #[test]
    fn translation_is_deterministic(m in model()) {
        prop_assert_eq!(translate_model(&m).unwrap(), translate_model(&m.clone()).unwrap());
    }
}
