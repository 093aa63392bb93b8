use std::collections::BTreeSet;

use inverseopt::harness::{gen_instance, GenKind, GenMode, GenSpec};
use inverseopt::mst::{
    all_swap_constraints, find_violating_tree_edges, solve_deterministic, solve_deterministic_with_config,
    solve_linear, solve_naive, solve_naive_exact, solve_randomized, DeterministicConfig,
};
use inverseopt::tree::{build_lca, is_swap, RootedTree};
use inverseopt::{serialize_instance, Instance, SolveOutcome};
use proptest::prelude::*;

fn mode_strategy() -> impl Strategy<Value = GenMode> {
    prop_oneof![
        Just(GenMode::FeasibleByConstruction),
        Just(GenMode::InfeasibleGadget),
        Just(GenMode::Random)
    ]
}

fn tree_instance(n: usize, extra: usize, d: usize, seed: u64, mode: GenMode) -> Instance {
    let gadget = usize::from(mode == GenMode::InfeasibleGadget);
    let m = (n - 1 + extra).min(n * (n - 1) / 2) + gadget;
    gen_instance(&GenSpec {
        kind: GenKind::SpanningTree,
        n,
        m,
        d,
        seed,
        mode,
    })
    .unwrap()
    .instance
}

fn same(a: &SolveOutcome, b: &SolveOutcome) -> bool {
    a.is_feasible() == b.is_feasible() && (!a.is_feasible() || (a.delta.unwrap() - b.delta.unwrap()).abs() <= 1e-6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn solvers_agree(n in 3usize..30, extra in 0usize..60, d in 1usize..=4, seed in any::<u64>(), mode in mode_strategy()) {
        let inst = tree_instance(n, extra, d, seed, mode);
        let (g, t) = (&inst.graph, &inst.target.edges);
        let reference = solve_naive(g, t).unwrap();
        if mode == GenMode::FeasibleByConstruction {
            prop_assert!(reference.is_feasible());
        }
        if mode == GenMode::InfeasibleGadget {
            prop_assert!(!reference.is_feasible());
        }
        for (name, out) in [
            ("randomized", solve_randomized(g, t, seed).unwrap()),
            ("linear", solve_linear(g, t, seed).unwrap()),
            ("deterministic", solve_deterministic(g, t, None, seed).unwrap()),
        ] {
            prop_assert!(same(&reference, &out), "{} disagrees: {:?} vs {:?}", name, out, reference);
        }
    }

    #[test]
    fn shrunken_nets_still_agree(n in 6usize..40, extra in 10usize..80, d in 1usize..=3, seed in any::<u64>()) {
        let inst = tree_instance(n, extra, d, seed, GenMode::Random);
        let (g, t) = (&inst.graph, &inst.target.edges);
        let reference = solve_naive(g, t).unwrap();
        for size in [1, 3] {
            let config = DeterministicConfig { net_size: Some(size), ..Default::default() };
            let (out, _) = solve_deterministic_with_config(g, t, &config, seed).unwrap();
            prop_assert!(same(&reference, &out));
        }
    }

    #[test]
    fn exact_naive_agrees_on_verdict(n in 3usize..12, extra in 0usize..20, d in 1usize..=3, seed in any::<u64>(), mode in mode_strategy()) {
        let inst = tree_instance(n, extra, d, seed, mode);
        let a = solve_naive(&inst.graph, &inst.target.edges).unwrap();
        let b = solve_naive_exact(&inst.graph, &inst.target.edges).unwrap();
        prop_assert_eq!(a.is_feasible(), b.is_feasible());
    }

    #[test]
    fn violating_edges_match_brute(
        n in 3usize..25, extra in 0usize..50, d in 1usize..=3, seed in any::<u64>(),
        raw in prop::collection::vec(-1.0f64..1.0, 3), slack in 0.0f64..0.3,
    ) {
        let inst = tree_instance(n, extra, d, seed, GenMode::Random);
        let (g, t) = (&inst.graph, &inst.target.edges);
        let p: Vec<f64> = raw[..d].to_vec();
        let w = g.weights_at(&p);
        let rooted = RootedTree::from_graph(g, t).unwrap();
        let lca = build_lca(&rooted);
        let in_tree: BTreeSet<usize> = t.iter().copied().collect();
        let mut want = BTreeSet::new();
        for &e in t {
            for f in (0..g.num_edges()).filter(|f| !in_tree.contains(f)) {
                if is_swap(g, &rooted, &lca, e, f).unwrap() && w[f] - w[e] <= slack {
                    want.insert(e);
                }
            }
        }
        let got: BTreeSet<usize> = find_violating_tree_edges(g, t, &p, slack).unwrap().into_iter().collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn generator_is_deterministic(n in 3usize..30, extra in 0usize..40, d in 1usize..=4, seed in any::<u64>(), mode in mode_strategy()) {
        let a = serialize_instance(&tree_instance(n, extra, d, seed, mode));
        let b = serialize_instance(&tree_instance(n, extra, d, seed, mode));
        prop_assert_eq!(a, b);
    }
}

#[test]
fn swap_constraints_cover_every_cycle_edge() {
    // a 4-cycle: the one non-tree edge swaps with all three tree edges
    let inst = inverseopt::parse_instance(
        r#"{"num_vertices":4,"dimension":1,"edges":[
            {"u":0,"v":1,"cost":[1]},{"u":1,"v":2,"cost":[1]},{"u":2,"v":3,"cost":[1]},{"u":3,"v":0,"cost":[2]}],
            "target":{"kind":"spanning_tree","edges":[0,1,2]}}"#,
    )
    .unwrap();
    assert_eq!(all_swap_constraints(&inst.graph, &inst.target.edges).unwrap().len(), 3);
    let out = solve_naive(&inst.graph, &inst.target.edges).unwrap();
    assert_eq!(out.params.unwrap(), vec![1.0]);
    assert!((out.delta.unwrap() - 1.0).abs() < 1e-12);
}
