use mfm_fol::plan::{abduce_plan, extract_action_sequence, validate_plan, PlanError};
use mfm_fol_testkit::{bfs_min_actions, random_plan_case, rng};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn returned_plans_replay(seed in any::<u64>()) {
        let p = random_plan_case(&mut rng(seed)).problem();
        if let Ok(g) = abduce_plan(&p) {
            let report = validate_plan(&p, &g);
            prop_assert!(report.valid, "{:?}", report.diagnostics);
        }
    }

    #[test]
    fn plans_are_minimal_and_complete(seed in any::<u64>()) {
        let p = random_plan_case(&mut rng(seed)).problem();
        let oracle = bfs_min_actions(&p.clause_set, &p.goal, p.max_actions);
        match abduce_plan(&p) {
            Ok(g) => prop_assert_eq!(Some(g.action_order.len()), oracle),
            Err(PlanError::NoPlan(_)) => prop_assert_eq!(oracle, None),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn plan_graphs_are_acyclic_and_stable(seed in any::<u64>()) {
        let p = random_plan_case(&mut rng(seed)).problem();
        let a = abduce_plan(&p);
        prop_assert_eq!(&a, &abduce_plan(&p));
        if let Ok(g) = a {
            let seq = extract_action_sequence(&g).unwrap();
            prop_assert_eq!(seq.len(), g.action_count());
            prop_assert_eq!(g.action_order.len(), g.action_count());
        }
    }
}
