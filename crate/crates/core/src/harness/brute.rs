//! Exhaustive references for small instances: every suitable subgraph, the
//! LP over all of their constraints, and LP by vertex enumeration.

use crate::error::Result;
use crate::graph::{subgraph_cost, Dsu, EdgeId, Instance, ParamGraph, TargetKind};
use crate::lp::{self, delta_cap_for, LinearConstraint, Origin, Sense, StrictOutcome};
use crate::oracles::weight_of;

fn combinations(m: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, f);
            cur.pop();
        }
    }
    rec(0, m, k, &mut Vec::with_capacity(k), f);
}

pub fn all_spanning_trees(g: &ParamGraph) -> Vec<Vec<EdgeId>> {
    let n = g.num_vertices();
    let mut out = Vec::new();
    combinations(g.num_edges(), n - 1, &mut |set| {
        let mut dsu = Dsu::new(n);
        if set.iter().all(|&e| dsu.union(g.edge(e).u, g.edge(e).v)) {
            out.push(set.to_vec());
        }
    });
    out
}

/// Every simple `s`–`t` path, as sorted edge sets.
pub fn all_st_paths(g: &ParamGraph, s: usize, t: usize) -> Vec<Vec<EdgeId>> {
    fn rec(adj: &[Vec<(usize, EdgeId)>], v: usize, t: usize, seen: &mut [bool], path: &mut Vec<EdgeId>, out: &mut Vec<Vec<EdgeId>>) {
        if v == t {
            let mut p = path.clone();
            p.sort_unstable();
            out.push(p);
            return;
        }
        for &(x, e) in &adj[v] {
            if !seen[x] {
                seen[x] = true;
                path.push(e);
                rec(adj, x, t, seen, path, out);
                path.pop();
                seen[x] = false;
            }
        }
    }
    let adj = g.adjacency();
    let mut seen = vec![false; g.num_vertices()];
    seen[s] = true;
    let mut out = Vec::new();
    rec(&adj, s, t, &mut seen, &mut Vec::new(), &mut out);
    out.sort();
    out
}

pub fn all_perfect_matchings(g: &ParamGraph) -> Vec<Vec<EdgeId>> {
    fn rec(g: &ParamGraph, covered: &mut [bool], cur: &mut Vec<EdgeId>, out: &mut Vec<Vec<EdgeId>>) {
        let Some(v) = covered.iter().position(|c| !c) else {
            let mut m = cur.clone();
            m.sort_unstable();
            out.push(m);
            return;
        };
        covered[v] = true;
        for (e, edge) in g.edges().iter().enumerate() {
            if (edge.u == v || edge.v == v) && !covered[edge.other(v)] {
                let x = edge.other(v);
                covered[x] = true;
                cur.push(e);
                rec(g, covered, cur, out);
                cur.pop();
                covered[x] = false;
            }
        }
        covered[v] = false;
    }
    let mut out = Vec::new();
    rec(g, &mut vec![false; g.num_vertices()], &mut Vec::new(), &mut out);
    out.sort();
    out
}

pub fn all_subgraphs(g: &ParamGraph, kind: TargetKind) -> Vec<Vec<EdgeId>> {
    match kind {
        TargetKind::SpanningTree => all_spanning_trees(g),
        TargetKind::StPath { source, dest } => all_st_paths(g, source, dest),
        TargetKind::PerfectMatching => all_perfect_matchings(g),
    }
}

/// Minimum-weight subgraph by enumeration (ties by sorted ids).
pub fn brute_optimum(g: &ParamGraph, kind: TargetKind, w: &[f64]) -> Option<Vec<EdgeId>> {
    all_subgraphs(g, kind).into_iter().min_by(|a, b| weight_of(w, a).total_cmp(&weight_of(w, b)).then(a.cmp(b)))
}

/// One margin constraint per alternative subgraph, plus `w(e) >= 0` rows
/// where the instance asks for non-negative weights.
pub fn all_constraints(instance: &Instance) -> (Vec<LinearConstraint>, Vec<Vec<EdgeId>>) {
    let g = &instance.graph;
    let x = &instance.target;
    let cx = subgraph_cost(g, &x.edges);
    let mut rows = Vec::new();
    let mut subgraphs = Vec::new();
    for y in all_subgraphs(g, x.kind) {
        if y == x.edges {
            continue;
        }
        let normal = subgraph_cost(g, &y).iter().zip(&cx).map(|(a, b)| a - b).collect();
        rows.push(LinearConstraint::new(normal, 0.0, Sense::Gt, Origin::Subgraph(subgraphs.len())));
        subgraphs.push(y);
    }
    if instance.nonneg_weights || matches!(x.kind, TargetKind::StPath { .. }) {
        for e in 0..g.num_edges() {
            rows.push(LinearConstraint::new(g.cost(e).to_vec(), 0.0, Sense::Ge, Origin::NonNegative(e)));
            subgraphs.push(vec![e]);
        }
    }
    (rows, subgraphs)
}

/// The margin LP over every alternative subgraph.
pub fn brute_max_delta(instance: &Instance, seed: u64) -> Result<StrictOutcome> {
    let (rows, _) = all_constraints(instance);
    let cap = delta_cap_for(instance.graph.total_abs_cost());
    Ok(lp::solve_strict(&rows, instance.graph.dimension(), cap, seed)?)
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..k {
                        a[r][c] -= f * a[col][c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..k).map(|i| b[i] / a[i][i]).collect())
}

/// Maximizes `objective . x` over `rows` (`a . x >= b`) and the box
/// `lo <= x <= hi` by trying every vertex. Returns the optimal value and
/// a maximizer, or `None` if infeasible.
pub fn vertex_enumeration(rows: &[(Vec<f64>, f64)], objective: &[f64], lo: &[f64], hi: &[f64]) -> Option<(f64, Vec<f64>)> {
    let k = objective.len();
    let mut all: Vec<(Vec<f64>, f64)> = rows.to_vec();
    for i in 0..k {
        let mut e = vec![0.0; k];
        e[i] = 1.0;
        all.push((e.clone(), lo[i]));
        e[i] = -1.0;
        all.push((e, -hi[i]));
    }
    let tol = 1e-9;
    let mut best: Option<(f64, Vec<f64>)> = None;
    combinations(all.len(), k, &mut |set| {
        let a: Vec<Vec<f64>> = set.iter().map(|&i| all[i].0.clone()).collect();
        let b: Vec<f64> = set.iter().map(|&i| all[i].1).collect();
        let Some(x) = solve_square(a, b) else { return };
        let ok = all.iter().all(|(a, b)| {
            let v: f64 = a.iter().zip(&x).map(|(p, q)| p * q).sum();
            v >= b - tol * (1.0 + b.abs())
        });
        if ok {
            let val: f64 = objective.iter().zip(&x).map(|(p, q)| p * q).sum();
            if best.as_ref().map_or(true, |(bv, _)| val > *bv) {
                best = Some((val, x));
            }
        }
    });
    best
}
