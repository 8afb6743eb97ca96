use cotex_core::bfdn::{run_bfdn, theorem1_bound};
use cotex_core::recursive::run_bfdn_ell_checked;
use cotex_core::workbench::{gen_random_tree, gen_spider};
use cotex_core::{EdgeStatus, ExplorationView, Graph, World};
use proptest::prelude::*;

fn rank(s: EdgeStatus) -> u8 {
    match s {
        EdgeStatus::Unknown => 0,
        EdgeStatus::Dangling => 1,
        EdgeStatus::Traversed | EdgeStatus::Closed => 2,
    }
}

#[test]
fn regression_fixture_random_1000_7() {
    let t = gen_random_tree(1000, 7);
    assert_eq!((t.n(), t.depth(), t.max_degree()), (1000, 12, 10));
    assert_eq!(run_bfdn(&t, 8).unwrap().runtime, 298);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn view_only_grows(n in 2usize..300, seed in any::<u64>(), k in 1usize..12) {
        let t = gen_random_tree(n, seed);
        let trace = run_bfdn(&t, k).unwrap();
        let mut view = ExplorationView::new(&t);
        let mut status: Vec<_> = (0..t.edge_count()).map(|e| view.status(e)).collect();
        let mut discovered = view.discovered_count();
        for r in &trace.rounds {
            for mv in &r.moves {
                view.cross(&t, mv.edge, mv.from);
            }
            prop_assert!(view.discovered_count() >= discovered);
            discovered = view.discovered_count();
            for (e, old) in status.iter_mut().enumerate() {
                let now = view.status(e);
                prop_assert!(rank(now) >= rank(*old));
                prop_assert!(rank(*old) < 2 || now == *old);
                *old = now;
            }
        }
        prop_assert!(view.fully_explored());
        prop_assert_eq!(view.discovered_count(), n);
    }

    #[test]
    fn bfdn_is_deterministic_and_bounded(n in 1usize..400, seed in any::<u64>(), k in 1usize..20) {
        let t = gen_random_tree(n, seed);
        let a = run_bfdn(&t, k).unwrap();
        let b = run_bfdn(&t, k).unwrap();
        prop_assert_eq!(&a.rounds, &b.rounds);
        prop_assert!(a.explored && a.all_at_origin(0));
        prop_assert!(a.runtime as f64 <= theorem1_bound(n, t.depth(), k, t.max_degree()).ceil());
        prop_assert!(a.counters.edge_events <= 2 * (n - 1));
    }

    #[test]
    fn tree_fed_as_graph_matches(n in 1usize..200, seed in any::<u64>(), k in 1usize..8) {
        let t = gen_random_tree(n, seed);
        let g = Graph::from_tree(&t);
        prop_assert_eq!(run_bfdn(&t, k).unwrap().rounds, run_bfdn(&g, k).unwrap().rounds);
    }

    #[test]
    fn bfdn_ell_keeps_invariants(n in 2usize..250, seed in any::<u64>(), ell in 1u32..4, k in 1usize..30) {
        let t = gen_random_tree(n, seed);
        let (run, report) = run_bfdn_ell_checked(&t, ell, k).unwrap();
        prop_assert!(run.trace.explored && run.trace.all_at_origin(0));
        prop_assert!(run.bound_ok);
        prop_assert!(report.ok(), "{:?}", report.examples);
    }

    #[test]
    fn spider_bfdn_ell(legs in 1usize..9, len in 1usize..30, ell in 1u32..4, k in 1usize..30) {
        let t = gen_spider(legs, len);
        let (run, report) = run_bfdn_ell_checked(&t, ell, k).unwrap();
        prop_assert!(run.trace.explored && run.bound_ok);
        prop_assert!(report.ok(), "{:?}", report.examples);
    }
}
