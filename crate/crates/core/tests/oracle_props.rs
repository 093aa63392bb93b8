use inverseopt::harness::brute::{all_constraints, all_subgraphs};
use inverseopt::harness::{gen_instance, GenKind, GenMode, GenSpec};
use inverseopt::oracles::{make_separation_oracle, optimal_subgraph, second_best_at, weight_of};
use inverseopt::{Instance, OracleReply, SeparationOracle, TargetKind};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn kind_strategy() -> impl Strategy<Value = GenKind> {
    prop_oneof![Just(GenKind::SpanningTree), Just(GenKind::StPath), Just(GenKind::PerfectMatching)]
}

/// Small instances whose subgraphs are cheap to enumerate.
fn small_instance(kind: GenKind, size: usize, extra: usize, d: usize, seed: u64) -> Instance {
    let (n, m) = match kind {
        GenKind::SpanningTree => (4 + size % 5, 0),
        GenKind::StPath => (4 + size % 7, 0),
        GenKind::PerfectMatching => (2 * (2 + size % 4), 0),
    };
    let m = if m == 0 { (n - 1 + extra).min(n * (n - 1) / 2).min(14) } else { m };
    let spec = GenSpec {
        kind,
        n,
        m,
        d,
        seed,
        mode: GenMode::Random,
    };
    gen_instance(&spec).unwrap().instance
}

/// Random parameters; path instances get `p >= 0` so weights stay non-negative.
fn params(inst: &Instance, raw: &[f64]) -> Vec<f64> {
    let d = inst.graph.dimension();
    raw.iter()
        .take(d)
        .map(|&x| if matches!(inst.target.kind, TargetKind::StPath { .. }) { x.abs() } else { x })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn optimum_matches_enumeration(
        kind in kind_strategy(), size in 0usize..20, extra in 0usize..8, d in 1usize..=3,
        seed in any::<u64>(), raw in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let inst = small_instance(kind, size, extra, d, seed);
        let p = params(&inst, &raw);
        let w = inst.graph.weights_at(&p);
        let got = optimal_subgraph(&inst.graph, inst.target.kind, &w).unwrap();
        let every = all_subgraphs(&inst.graph, inst.target.kind);
        prop_assert!(every.contains(&got), "not a suitable subgraph: {:?}", got);
        let best = every.iter().map(|y| weight_of(&w, y)).fold(f64::INFINITY, f64::min);
        prop_assert!((weight_of(&w, &got) - best).abs() <= TOL);
    }

    #[test]
    fn second_best_is_the_best_alternative(
        kind in kind_strategy(), size in 0usize..20, extra in 0usize..8, d in 1usize..=3,
        seed in any::<u64>(), raw in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let inst = small_instance(kind, size, extra, d, seed);
        let p = params(&inst, &raw);
        let w = inst.graph.weights_at(&p);
        let others: Vec<Vec<usize>> = all_subgraphs(&inst.graph, inst.target.kind)
            .into_iter()
            .filter(|y| *y != inst.target.edges)
            .collect();
        match second_best_at(&inst.graph, &inst.target, &w) {
            Ok(y) => {
                let mut sorted = y.clone();
                sorted.sort_unstable();
                prop_assert!(others.contains(&sorted));
                let want = others.iter().map(|y| weight_of(&w, y)).fold(f64::INFINITY, f64::min);
                prop_assert!((weight_of(&w, &y) - want).abs() <= TOL);
                let opt = optimal_subgraph(&inst.graph, inst.target.kind, &w).unwrap();
                prop_assert!(weight_of(&w, &y) >= weight_of(&w, &opt) - TOL);
            }
            Err(_) => prop_assert!(others.is_empty()),
        }
    }

    #[test]
    fn separation_replies_are_sound(
        kind in kind_strategy(), size in 0usize..20, extra in 0usize..8, d in 1usize..=3,
        seed in any::<u64>(), raw in prop::collection::vec(-1.0f64..1.0, 3), delta in -0.5f64..2.0,
        exact in any::<bool>(),
    ) {
        let inst = small_instance(kind, size, extra, d, seed);
        let p: Vec<f64> = raw.iter().take(d).copied().collect();
        let (rows, subgraphs) = all_constraints(&inst);
        let mut oracle = make_separation_oracle(&inst, exact);
        let margin = |c: &inverseopt::LinearConstraint| {
            c.value_at(&p) - c.rhs - if c.sense == inverseopt::Sense::Gt { delta } else { 0.0 }
        };
        match oracle.query(&p, delta).unwrap() {
            OracleReply::Cut { halfspace, subgraph } => {
                // the cut is one of the true constraints and (p, delta) violates it
                let mut edges = subgraph.clone();
                edges.sort_unstable();
                let i = (0..rows.len()).find(|&i| subgraphs[i] == edges && rows[i].sense == halfspace.sense);
                prop_assert!(i.is_some(), "cut {:?} is not a real constraint", edges);
                let i = i.unwrap();
                for (a, b) in rows[i].normal.iter().zip(&halfspace.normal) {
                    prop_assert!((a - b).abs() <= TOL);
                }
                prop_assert!(margin(&halfspace) < TOL);
            }
            OracleReply::FeasibleHere => {
                if exact {
                    for c in &rows {
                        prop_assert!(margin(c) >= -1e-7, "FeasibleHere but {:?} is violated", c.origin);
                    }
                }
            }
            OracleReply::Solved { delta: gap } => {
                prop_assert!(!exact);
                prop_assert!(gap > 0.0);
                for c in &rows {
                    let slack = c.value_at(&p) - c.rhs - if c.sense == inverseopt::Sense::Gt { gap } else { 0.0 };
                    prop_assert!(slack >= -1e-7);
                }
            }
        }
    }
}
