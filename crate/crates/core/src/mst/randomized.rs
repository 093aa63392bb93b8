//! Random sampling of potential swaps with iterative forcing of violated
//! constraints.
//!
//! Each round draws `d * sqrt(m n)` (tree edge, non-tree edge) pairs, keeps
//! the ones that really are swaps, and solves the LP on the sample together
//! with the forced set `S`. All swaps violated at the resulting point are
//! listed through the heaviest-edge tree and added to `S`. A base of the full
//! LP has at most `d + 1` constraints and every productive round forces at
//! least one new base member, so `d + 1` rounds suffice; a final solve on `S`
//! plus a safety loop handles the rest.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{scan_slack, swap_constraint, Decision, Problem};
use crate::error::Result;
use crate::graph::{EdgeId, ParamGraph};
use crate::lp::LinearConstraint;
use crate::outcome::SolveOutcome;
use crate::tree::{build_heavy_tree, is_swap_between, violated_swaps_for_edge};

pub fn solve_randomized(g: &ParamGraph, tree: &[EdgeId], seed: u64) -> Result<SolveOutcome> {
    let p = Problem::new(g, tree)?;
    randomized(&p, seed)
}

/// Swaps violated at `(params, delta)`: `w(f) - w(e)` below `delta` beyond tolerance.
pub(crate) fn violated_swaps(p: &Problem, params: &[f64], delta: f64) -> Vec<(EdgeId, EdgeId)> {
    if p.tree.is_empty() {
        return vec![];
    }
    let w = p.g.weights_at(params);
    let ht = build_heavy_tree(&p.rooted, &w);
    let slack = scan_slack(delta);
    let mut out = Vec::new();
    for &f in &p.non_tree {
        let edge = p.g.edge(f);
        for e in violated_swaps_for_edge(&p.rooted, &p.lca, &ht, edge.u, edge.v, w[f] - slack) {
            out.push((e, f));
        }
    }
    out
}

pub(crate) fn randomized(p: &Problem, seed: u64) -> Result<SolveOutcome> {
    let d = p.dim();
    let n = p.g.num_vertices();
    let m = p.g.num_edges();
    let swaps_possible = !p.tree.is_empty() && !p.non_tree.is_empty();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample_size = ((d as f64) * ((m as f64) * (n as f64)).sqrt()).ceil() as usize;

    let mut forced: Vec<(EdgeId, EdgeId)> = Vec::new();
    let mut in_forced: HashSet<(EdgeId, EdgeId)> = HashSet::new();
    let solve = |swaps: &[(EdgeId, EdgeId)], seed: u64| -> Result<Decision> {
        let constraints: Vec<LinearConstraint> = swaps.iter().map(|&(e, f)| swap_constraint(p.g, e, f)).collect();
        p.decide(&constraints, seed)
    };

    if swaps_possible {
        for round in 0..=d {
            let mut sample: Vec<(EdgeId, EdgeId)> = Vec::with_capacity(sample_size + forced.len());
            let mut seen: HashSet<(EdgeId, EdgeId)> = in_forced.clone();
            for _ in 0..sample_size {
                let e = p.tree[rng.gen_range(0..p.tree.len())];
                let f = p.non_tree[rng.gen_range(0..p.non_tree.len())];
                let edge = p.g.edge(f);
                if is_swap_between(&p.rooted, &p.lca, e, edge.u, edge.v) && seen.insert((e, f)) {
                    sample.push((e, f));
                }
            }
            sample.extend(forced.iter().copied());
            sample.sort_unstable();
            let (params, delta) = match solve(&sample, seed ^ (round as u64 + 1))? {
                Decision::Infeasible(out) => return Ok(out),
                Decision::Feasible { params, delta } => (params, delta),
            };
            let violated = violated_swaps(p, &params, delta);
            if violated.is_empty() {
                return Ok(p.finish(params, delta));
            }
            for s in violated {
                if in_forced.insert(s) {
                    forced.push(s);
                }
            }
        }
    }

    loop {
        forced.sort_unstable();
        let (params, delta) = match solve(&forced, seed)? {
            Decision::Infeasible(out) => return Ok(out),
            Decision::Feasible { params, delta } => (params, delta),
        };
        let mut grew = false;
        for s in violated_swaps(p, &params, delta) {
            if in_forced.insert(s) {
                forced.push(s);
                grew = true;
            }
        }
        if !grew {
            return Ok(p.finish(params, delta));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_instance;
    use crate::mst::solve_naive;

    #[test]
    fn tri1_any_seed() {
        let inst = parse_instance(include_str!("../../../../fixtures/tri1.json")).unwrap();
        for seed in 0..20 {
            let out = solve_randomized(&inst.graph, &inst.target.edges, seed).unwrap();
            assert_eq!(out.params, Some(vec![1.0, 1.0]));
            assert_eq!(out.delta, Some(1.0));
        }
    }

    #[test]
    fn inf1_infeasible() {
        let inst = parse_instance(include_str!("../../../../fixtures/inf1.json")).unwrap();
        let out = solve_randomized(&inst.graph, &inst.target.edges, 3).unwrap();
        assert!(!out.is_feasible());
        assert_eq!(out.witness[0].edges, vec![1]);
    }

    #[test]
    fn tri1_violations_at_tilted_point() {
        let inst = parse_instance(include_str!("../../../../fixtures/tri1.json")).unwrap();
        let p = Problem::new(&inst.graph, &inst.target.edges).unwrap();
        assert!(violated_swaps(&p, &[1.0, 1.0], 0.0).is_empty());
        assert_eq!(violated_swaps(&p, &[-1.0, 1.0], 0.0), vec![(1, 2)]);
        assert_eq!(solve_naive(&inst.graph, &inst.target.edges).unwrap().params, Some(vec![1.0, 1.0]));
    }
}
