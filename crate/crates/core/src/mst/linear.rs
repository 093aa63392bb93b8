//! Sampling tree edges instead of swaps.
//!
//! A random sample `R` of `d * sqrt(n)` tree edges is kept together with the
//! forced set `S` and every other tree edge is contracted. The contracted
//! instance only carries the swaps whose tree edge survives, and is solved
//! by the potential-swap sampler. Tree edges in violated swaps at the
//! resulting point are found in near-linear time from an MST at that point
//! and added to `S`.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::randomized::randomized;
use super::{scan_slack, swap_constraint, Problem};
use crate::error::{Error, Result};
use crate::graph::{Dsu, EdgeId, ParamGraph};
use crate::lp::Origin;
use crate::outcome::{SolveOutcome, Status, WitnessEntry};
use crate::tree::{RootedTree, NONE};

/// A graph with some tree edges contracted.
#[derive(Debug, Clone)]
pub struct Contracted {
    pub graph: ParamGraph,
    /// Images of the kept tree edges (ids in `graph`).
    pub tree: Vec<EdgeId>,
    /// New edge id → original edge id.
    pub edge_map: Vec<EdgeId>,
    /// Original vertex → new vertex.
    pub vertex_map: Vec<usize>,
}

/// Contracts every edge of `tree` not in `keep`. Loops created by the
/// contraction are dropped, parallel edges kept; surviving edges keep their
/// relative order.
pub fn contract_tree_edges(g: &ParamGraph, tree: &[EdgeId], keep: &[EdgeId]) -> Result<Contracted> {
    let m = g.num_edges();
    let mut in_tree = vec![false; m];
    for &e in tree {
        if e >= m {
            return Err(crate::error::GraphError::InvalidEdge(e).into());
        }
        in_tree[e] = true;
    }
    let mut kept = vec![false; m];
    for &e in keep {
        if e >= m || !in_tree[e] {
            return Err(Error::Contract(format!("kept edge {e} is not a tree edge")));
        }
        kept[e] = true;
    }
    let n = g.num_vertices();
    let mut dsu = Dsu::new(n);
    for &e in tree {
        if !kept[e] {
            let edge = g.edge(e);
            dsu.union(edge.u, edge.v);
        }
    }
    let mut label = vec![NONE; n];
    let mut vertex_map = vec![0; n];
    let mut count = 0;
    for (v, slot) in vertex_map.iter_mut().enumerate() {
        let r = dsu.find(v);
        if label[r] == NONE {
            label[r] = count;
            count += 1;
        }
        *slot = label[r];
    }
    let mut graph = ParamGraph::new(count, g.dimension())?;
    let mut edge_map = Vec::new();
    let mut new_tree = Vec::new();
    for (id, edge) in g.edges().iter().enumerate() {
        let (a, b) = (vertex_map[edge.u], vertex_map[edge.v]);
        if a == b {
            continue;
        }
        let new_id = graph.add_edge(a, b, edge.cost.0.clone())?;
        if kept[id] {
            new_tree.push(new_id);
        }
        edge_map.push(id);
    }
    Ok(Contracted {
        graph,
        tree: new_tree,
        edge_map,
        vertex_map,
    })
}

/// Tree edges `e` in some swap `(e, f)` with `w(f) - w(e) <= slack`.
///
/// With tree weights shifted up by `slack`, an MST `M` preferring non-tree
/// edges on ties contains the lightest edge across the cut of every tree
/// edge, so the best swap partner of each tree edge lies in `X = M \ T`.
/// The tree is reduced to the vertices touched by `X`, chains of untouched
/// degree-two vertices becoming single super-edges, and best partners are
/// assigned by walking `X` in increasing weight with a skip structure.
pub fn find_violating_tree_edges(g: &ParamGraph, tree: &[EdgeId], p: &[f64], slack: f64) -> Result<Vec<EdgeId>> {
    if p.len() != g.dimension() {
        return Err(crate::error::GraphError::DimensionMismatch {
            expected: g.dimension(),
            found: p.len(),
        }
        .into());
    }
    let n = g.num_vertices();
    let m = g.num_edges();
    let mut in_tree = vec![false; m];
    for &e in tree {
        in_tree[e] = true;
    }
    let w = g.weights_at(p);
    let shifted: Vec<f64> = (0..m).map(|e| if in_tree[e] { w[e] + slack } else { w[e] }).collect();

    let mut order: Vec<EdgeId> = (0..m).collect();
    order.sort_unstable_by(|&a, &b| {
        shifted[a]
            .total_cmp(&shifted[b])
            .then(in_tree[a].cmp(&in_tree[b]))
            .then(a.cmp(&b))
    });
    let mut dsu = Dsu::new(n);
    let mut x_edges = Vec::new();
    for &e in &order {
        let edge = g.edge(e);
        if dsu.union(edge.u, edge.v) && !in_tree[e] {
            x_edges.push(e);
        }
    }
    if x_edges.is_empty() {
        return Ok(vec![]);
    }

    let mut marked = vec![false; n];
    for &f in &x_edges {
        marked[g.edge(f).u] = true;
        marked[g.edge(f).v] = true;
    }
    let mut adj: Vec<Vec<(usize, EdgeId)>> = vec![Vec::new(); n];
    for &e in tree {
        let edge = g.edge(e);
        adj[edge.u].push((edge.v, e));
        adj[edge.v].push((edge.u, e));
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut alive_edge = vec![false; m];
    for &e in tree {
        alive_edge[e] = true;
    }
    let mut alive = vec![true; n];
    let mut leaves: Vec<usize> = (0..n).filter(|&v| degree[v] == 1 && !marked[v]).collect();
    while let Some(v) = leaves.pop() {
        if !alive[v] || degree[v] != 1 {
            continue;
        }
        alive[v] = false;
        let &(u, e) = adj[v].iter().find(|&&(_, e)| alive_edge[e]).expect("leaf edge");
        alive_edge[e] = false;
        degree[v] = 0;
        degree[u] -= 1;
        if degree[u] == 1 && !marked[u] {
            leaves.push(u);
        }
    }

    let is_key = |v: usize| alive[v] && (marked[v] || degree[v] != 2);
    let mut key_id = vec![NONE; n];
    let mut keys = 0;
    for v in 0..n {
        if is_key(v) {
            key_id[v] = keys;
            keys += 1;
        }
    }
    let mut super_ends: Vec<(usize, usize)> = Vec::new();
    let mut chains: Vec<Vec<EdgeId>> = Vec::new();
    let mut walked = vec![false; m];
    for a in 0..n {
        if key_id[a] == NONE {
            continue;
        }
        for &(b, e) in &adj[a] {
            if !alive_edge[e] || walked[e] {
                continue;
            }
            let mut chain = vec![e];
            walked[e] = true;
            let (mut prev_edge, mut cur) = (e, b);
            while key_id[cur] == NONE {
                let &(next, ne) = adj[cur]
                    .iter()
                    .find(|&&(_, x)| alive_edge[x] && x != prev_edge)
                    .expect("chain continues");
                walked[ne] = true;
                chain.push(ne);
                prev_edge = ne;
                cur = next;
            }
            super_ends.push((key_id[a], key_id[cur]));
            chains.push(chain);
        }
    }

    let ids: Vec<usize> = (0..chains.len()).collect();
    let ct = RootedTree::new(keys, &super_ends, &ids, 0).expect("reduced tree is a tree");
    let mut up: Vec<usize> = (0..keys).collect();
    fn find(up: &mut [usize], mut x: usize) -> usize {
        while up[x] != x {
            up[x] = up[up[x]];
            x = up[x];
        }
        x
    }
    let mut best = vec![NONE; chains.len()];
    x_edges.sort_unstable_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b)));
    for &f in &x_edges {
        let (mut x, mut y) = (find(&mut up, key_id[g.edge(f).u]), find(&mut up, key_id[g.edge(f).v]));
        while x != y {
            if ct.depth[x] < ct.depth[y] {
                std::mem::swap(&mut x, &mut y);
            }
            best[ct.parent_edge[x]] = f;
            up[x] = ct.parent[x];
            x = find(&mut up, x);
        }
    }

    let mut out = Vec::new();
    for (s, chain) in chains.iter().enumerate() {
        let f = best[s];
        if f == NONE {
            continue;
        }
        out.extend(chain.iter().copied().filter(|&e| w[f] <= shifted[e]));
    }
    out.sort_unstable();
    Ok(out)
}

/// Solves the instance with all tree edges outside `keep` contracted.
fn solve_kept(p: &Problem, keep: &[EdgeId], seed: u64) -> Result<SolveOutcome> {
    let c = contract_tree_edges(p.g, &p.tree, keep)?;
    let sub = Problem::with_cap(&c.graph, &c.tree, p.cap)?;
    let mut out = randomized(&sub, seed)?;
    if out.status == Status::Infeasible {
        out.witness = out
            .witness
            .iter()
            .map(|w| match w.constraint.origin {
                Origin::Swap { tree, other } => {
                    let (e, f) = (c.edge_map[tree], c.edge_map[other]);
                    WitnessEntry {
                        kind: w.kind,
                        edges: p.alternative_tree(e, f),
                        constraint: swap_constraint(p.g, e, f),
                    }
                }
                _ => w.clone(),
            })
            .collect();
    }
    Ok(out)
}

pub fn solve_linear(g: &ParamGraph, tree: &[EdgeId], seed: u64) -> Result<SolveOutcome> {
    let p = Problem::new(g, tree)?;
    if p.tree.is_empty() || p.non_tree.is_empty() {
        return randomized(&p, seed);
    }
    let d = p.dim();
    let n = g.num_vertices();
    let sample_size = (((d as f64) * (n as f64).sqrt()).ceil() as usize).min(p.tree.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut forced: HashSet<EdgeId> = HashSet::new();

    let mut round = 0;
    loop {
        let mut keep: Vec<EdgeId> = forced.iter().copied().collect();
        if round <= d {
            keep.extend((0..sample_size).map(|_| p.tree[rng.gen_range(0..p.tree.len())]));
        }
        keep.sort_unstable();
        keep.dedup();
        let out = solve_kept(&p, &keep, seed.wrapping_add(round as u64 + 1))?;
        if out.status == Status::Infeasible {
            return Ok(out);
        }
        let (params, delta) = (out.params.expect("feasible"), out.delta.expect("feasible"));
        let violated = find_violating_tree_edges(g, &p.tree, &params, scan_slack(delta))?;
        let before = forced.len();
        forced.extend(violated.iter().copied());
        if violated.is_empty() || (round > d && forced.len() == before) {
            return Ok(p.finish(params, delta));
        }
        round += 1;
    }
}

/// Number of tree edges in violated swaps at the optimum of the instance
/// restricted to `k` random tree edges (the others contracted).
pub fn sample_violation_count(g: &ParamGraph, tree: &[EdgeId], k: usize, seed: u64) -> Result<usize> {
    let p = Problem::new(g, tree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = k.min(p.tree.len());
    let keep: Vec<EdgeId> = sample(&mut rng, p.tree.len(), k).into_iter().map(|i| p.tree[i]).collect();
    let out = solve_kept(&p, &keep, seed)?;
    match (out.params, out.delta) {
        (Some(params), Some(delta)) => Ok(find_violating_tree_edges(g, &p.tree, &params, scan_slack(delta))?.len()),
        _ => Err(Error::Contract("restricted instance is infeasible".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_instance;
    use crate::mst::naive::swaps_of;

    fn tri1() -> crate::graph::Instance {
        parse_instance(include_str!("../../../../fixtures/tri1.json")).unwrap()
    }

    #[test]
    fn contraction_examples() {
        let inst = tri1();
        let g = &inst.graph;
        let all = contract_tree_edges(g, &[0, 1], &[0, 1]).unwrap();
        assert_eq!(all.edge_map, vec![0, 1, 2]);
        assert_eq!(all.graph.num_vertices(), 3);

        let none = contract_tree_edges(g, &[0, 1], &[]).unwrap();
        assert_eq!((none.graph.num_vertices(), none.graph.num_edges()), (1, 0));

        // contract (0,1): non-tree (0,2) becomes parallel to the image of (1,2)
        let one = contract_tree_edges(g, &[0, 1], &[1]).unwrap();
        assert_eq!(one.graph.num_vertices(), 2);
        assert_eq!(one.edge_map, vec![1, 2]);
        assert_eq!(one.tree, vec![0]);
        let (a, b) = (one.graph.edge(0), one.graph.edge(1));
        assert_eq!((a.u.min(a.v), a.u.max(a.v)), (b.u.min(b.v), b.u.max(b.v)));
        assert!(contract_tree_edges(g, &[0, 1], &[2]).is_err());
    }

    #[test]
    fn tri1_violations() {
        let inst = tri1();
        assert!(find_violating_tree_edges(&inst.graph, &[0, 1], &[1.0, 1.0], 0.0).unwrap().is_empty());
        assert_eq!(find_violating_tree_edges(&inst.graph, &[0, 1], &[-1.0, 1.0], 0.0).unwrap(), vec![1]);
        // the zero point ties every swap
        assert_eq!(find_violating_tree_edges(&inst.graph, &[0, 1], &[0.0, 0.0], 0.0).unwrap(), vec![0, 1]);
    }

    #[test]
    fn matches_swap_scan_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let n = rng.gen_range(2..60);
            let d = rng.gen_range(1..4);
            let mut g = ParamGraph::new(n, d).unwrap();
            for v in 1..n {
                let cost = (0..d).map(|_| rng.gen_range(-3..=3) as f64).collect();
                g.add_edge(rng.gen_range(0..v), v, cost).unwrap();
            }
            for _ in 0..rng.gen_range(0..3 * n) {
                let u = rng.gen_range(0..n);
                let v = (u + rng.gen_range(1..n)) % n;
                let cost = (0..d).map(|_| rng.gen_range(-3..=3) as f64).collect();
                g.add_edge(u, v, cost).unwrap();
            }
            let tree: Vec<EdgeId> = (0..n - 1).collect();
            let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-2..=2) as f64 * 0.5).collect();
            let slack = [0.0, 0.5, -0.5][rng.gen_range(0..3)];
            let problem = Problem::new(&g, &tree).unwrap();
            let w = g.weights_at(&p);
            let mut want: Vec<EdgeId> =
                swaps_of(&problem).into_iter().filter(|&(e, f)| w[f] - w[e] <= slack).map(|(e, _)| e).collect();
            want.sort_unstable();
            want.dedup();
            assert_eq!(find_violating_tree_edges(&g, &tree, &p, slack).unwrap(), want);
        }
    }

    #[test]
    fn tri1_and_inf1() {
        let inst = tri1();
        let out = solve_linear(&inst.graph, &inst.target.edges, 1).unwrap();
        assert_eq!(out.params, Some(vec![1.0, 1.0]));
        let inf = parse_instance(include_str!("../../../../fixtures/inf1.json")).unwrap();
        let out = solve_linear(&inf.graph, &inf.target.edges, 1).unwrap();
        assert!(!out.is_feasible());
        assert_eq!(out.witness[0].edges, vec![1]);
    }
}
