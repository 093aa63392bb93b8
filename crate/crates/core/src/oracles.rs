//! Optimization and second-best oracles for the three subgraph kinds, and
//! their wrapping as a separation oracle for the margin polyhedron.
//!
//! Every oracle breaks ties by edge ids so that "is `X` the unique optimum"
//! reduces to a margin check against the second-best subgraph.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::ellipsoid::{OracleReply, SeparationOracle};
use crate::error::{Error, OracleError, Result};
use crate::graph::{subgraph_cost, Dsu, EdgeId, Instance, ParamGraph, TargetKind, TargetSubgraph};
use crate::lp::{LinearConstraint, Origin, Sense, DELTA_MIN};
use crate::tree::{build_heavy_tree, build_lca, violated_swaps_for_edge, RootedTree};

/// Weights above this (negated) are treated as zero by the path search.
pub const NEGATIVE_WEIGHT_TOL: f64 = 1e-12;

/// Sum of `w` over `edges`, in the given order.
pub fn weight_of(w: &[f64], edges: &[EdgeId]) -> f64 {
    edges.iter().map(|&e| w[e]).sum()
}

fn sorted(mut edges: Vec<EdgeId>) -> Vec<EdgeId> {
    edges.sort_unstable();
    edges
}

fn mst_masked(g: &ParamGraph, w: &[f64], allowed: &[bool]) -> Result<Vec<EdgeId>> {
    let mut order: Vec<EdgeId> = (0..g.num_edges()).filter(|&e| allowed[e]).collect();
    order.sort_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b)));
    let mut dsu = Dsu::new(g.num_vertices());
    let mut tree = Vec::with_capacity(g.num_vertices().saturating_sub(1));
    for e in order {
        let edge = g.edge(e);
        if dsu.union(edge.u, edge.v) {
            tree.push(e);
        }
    }
    if dsu.components() != 1 {
        return Err(OracleError::Disconnected.into());
    }
    Ok(sorted(tree))
}

/// Minimum spanning tree at `p` (Kruskal on `(w, id)`), sorted by id.
pub fn mst_at(g: &ParamGraph, p: &[f64]) -> Result<Vec<EdgeId>> {
    mst_masked(g, &g.weights_at(p), &vec![true; g.num_edges()])
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    // min-heap on distance
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

fn sp_masked(g: &ParamGraph, s: usize, t: usize, w: &[f64], allowed: &[bool]) -> Result<Vec<EdgeId>> {
    let n = g.num_vertices();
    if let Some(e) = (0..g.num_edges()).find(|&e| allowed[e] && w[e] < -NEGATIVE_WEIGHT_TOL) {
        return Err(OracleError::NegativeWeight { edge: e, weight: w[e] }.into());
    }
    let w: Vec<f64> = w.iter().map(|&x| x.max(0.0)).collect();
    let mut adj: Vec<Vec<(usize, EdgeId)>> = vec![Vec::new(); n];
    for (e, edge) in g.edges().iter().enumerate() {
        if allowed[e] {
            adj[edge.u].push((edge.v, e));
            adj[edge.v].push((edge.u, e));
        }
    }
    for list in &mut adj {
        list.sort_unstable_by_key(|&(_, e)| e);
    }
    // distances to t
    let mut dist = vec![f64::INFINITY; n];
    dist[t] = 0.0;
    let mut heap = BinaryHeap::from([Item(0.0, t)]);
    while let Some(Item(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(x, e) in &adj[v] {
            let nd = d + w[e];
            if nd < dist[x] {
                dist[x] = nd;
                heap.push(Item(nd, x));
            }
        }
    }
    if !dist[s].is_finite() {
        return Err(OracleError::Unreachable { source_vertex: s, dest: t }.into());
    }
    let tight = |v: usize, x: usize, e: EdgeId| (w[e] + dist[x] - dist[v]).abs() <= 1e-12 * (1.0 + dist[v].abs());
    // With zero-weight edges the tight graph has cycles; only step to vertices
    // that still reach t through unvisited tight edges.
    let zero_edges = (0..g.num_edges()).any(|e| allowed[e] && w[e] <= 1e-12);
    let mut visited = vec![false; n];
    let reaches = |from: usize, visited: &[bool]| -> bool {
        let mut seen = visited.to_vec();
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            if v == t {
                return true;
            }
            for &(x, e) in &adj[v] {
                if !seen[x] && tight(v, x, e) {
                    seen[x] = true;
                    stack.push(x);
                }
            }
        }
        false
    };
    let mut path = Vec::new();
    let mut at = s;
    visited[s] = true;
    while at != t {
        let next = adj[at]
            .iter()
            .find(|&&(x, e)| !visited[x] && tight(at, x, e) && (!zero_edges || reaches(x, &visited)));
        let Some(&(x, e)) = next else {
            return Err(OracleError::Unreachable { source_vertex: s, dest: t }.into());
        };
        path.push(e);
        visited[x] = true;
        at = x;
    }
    Ok(path)
}

/// Shortest `s`–`t` path at `p` as an edge list from `s`; among shortest
/// paths the lexicographically smallest edge-id sequence.
pub fn shortest_path_at(g: &ParamGraph, s: usize, t: usize, p: &[f64]) -> Result<Vec<EdgeId>> {
    sp_masked(g, s, t, &g.weights_at(p), &vec![true; g.num_edges()])
}

/// Hungarian method on an `k x k` matrix with forbidden (`None`) entries.
fn hungarian(a: &[Vec<Option<f64>>]) -> Option<Vec<usize>> {
    let k = a.len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; k + 1];
    let mut v = vec![0.0; k + 1];
    let mut assigned = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for i in 1..=k {
        assigned[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = assigned[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                if let Some(c) = a[i0 - 1][j - 1] {
                    let cur = c - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if !delta.is_finite() {
                return None;
            }
            for j in 0..=k {
                if used[j] {
                    u[assigned[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if assigned[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            assigned[j0] = assigned[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0; k];
    for j in 1..=k {
        row_to_col[assigned[j] - 1] = j - 1;
    }
    Some(row_to_col)
}

struct Bipartite {
    left: Vec<usize>,
    right: Vec<usize>,
    /// Position of each vertex within its side.
    slot: Vec<usize>,
    is_left: Vec<bool>,
}

fn sides(g: &ParamGraph) -> Result<Bipartite> {
    let color = g.two_coloring().ok_or(OracleError::NotBipartite)?;
    let n = g.num_vertices();
    let left: Vec<usize> = (0..n).filter(|&v| !color[v]).collect();
    let right: Vec<usize> = (0..n).filter(|&v| color[v]).collect();
    if left.len() != right.len() {
        return Err(OracleError::NoPerfectMatching.into());
    }
    let mut slot = vec![0; n];
    for (i, &v) in left.iter().enumerate() {
        slot[v] = i;
    }
    for (i, &v) in right.iter().enumerate() {
        slot[v] = i;
    }
    Ok(Bipartite {
        left,
        right,
        slot,
        is_left: color.iter().map(|c| !c).collect(),
    })
}

/// Optimum weight of a perfect matching on the vertices not yet `covered`,
/// using allowed edges only; `None` when no perfect matching exists.
fn matching_value(g: &ParamGraph, bp: &Bipartite, w: &[f64], allowed: &[bool], covered: &[bool]) -> Option<f64> {
    let rows: Vec<usize> = bp.left.iter().copied().filter(|&v| !covered[v]).collect();
    let cols: Vec<usize> = bp.right.iter().copied().filter(|&v| !covered[v]).collect();
    if rows.len() != cols.len() {
        return None;
    }
    if rows.is_empty() {
        return Some(0.0);
    }
    let mut row_of = vec![usize::MAX; bp.left.len()];
    for (i, &v) in rows.iter().enumerate() {
        row_of[bp.slot[v]] = i;
    }
    let mut col_of = vec![usize::MAX; bp.right.len()];
    for (j, &v) in cols.iter().enumerate() {
        col_of[bp.slot[v]] = j;
    }
    let k = rows.len();
    let mut a: Vec<Vec<Option<f64>>> = vec![vec![None; k]; k];
    for (e, edge) in g.edges().iter().enumerate() {
        if !allowed[e] || covered[edge.u] || covered[edge.v] {
            continue;
        }
        let (l, r) = if bp.is_left[edge.u] { (edge.u, edge.v) } else { (edge.v, edge.u) };
        let (i, j) = (row_of[bp.slot[l]], col_of[bp.slot[r]]);
        let cell = &mut a[i][j];
        if cell.map_or(true, |c| w[e] < c) {
            *cell = Some(w[e]);
        }
    }
    let assignment = hungarian(&a)?;
    Some((0..k).map(|i| a[i][assignment[i]].expect("assigned entries are allowed")).sum())
}

fn matching_masked(g: &ParamGraph, w: &[f64], allowed: &[bool]) -> Result<Vec<EdgeId>> {
    let bp = sides(g)?;
    let n = g.num_vertices();
    let mut covered = vec![false; n];
    let best = matching_value(g, &bp, w, allowed, &covered).ok_or(OracleError::NoPerfectMatching)?;
    let scale: f64 = w.iter().map(|x| x.abs()).sum::<f64>() + 1.0;
    let tol = 1e-9 * scale;
    // greedy lex-min: keep the smallest id that extends to an optimum
    let mut chosen = Vec::new();
    let mut fixed = 0.0;
    for e in 0..g.num_edges() {
        let edge = g.edge(e);
        if !allowed[e] || covered[edge.u] || covered[edge.v] {
            continue;
        }
        covered[edge.u] = true;
        covered[edge.v] = true;
        let keep = matching_value(g, &bp, w, allowed, &covered).is_some_and(|rest| fixed + w[e] + rest <= best + tol);
        if keep {
            chosen.push(e);
            fixed += w[e];
            if chosen.len() * 2 == n {
                break;
            }
        } else {
            covered[edge.u] = false;
            covered[edge.v] = false;
        }
    }
    Ok(chosen)
}

/// Minimum-weight perfect matching at `p` of a bipartite graph, sorted by
/// id; among optima the lexicographically smallest id set.
pub fn min_matching_at(g: &ParamGraph, p: &[f64]) -> Result<Vec<EdgeId>> {
    matching_masked(g, &g.weights_at(p), &vec![true; g.num_edges()])
}

fn optimal_masked(g: &ParamGraph, kind: TargetKind, w: &[f64], allowed: &[bool]) -> Result<Vec<EdgeId>> {
    Ok(match kind {
        TargetKind::SpanningTree => mst_masked(g, w, allowed)?,
        TargetKind::StPath { source, dest } => sorted(sp_masked(g, source, dest, w, allowed)?),
        TargetKind::PerfectMatching => matching_masked(g, w, allowed)?,
    })
}

/// Optimal subgraph of the given kind under weights `w`, sorted by id.
pub fn optimal_subgraph(g: &ParamGraph, kind: TargetKind, w: &[f64]) -> Result<Vec<EdgeId>> {
    optimal_masked(g, kind, w, &vec![true; g.num_edges()])
}

fn better(w: &[f64], a: &[EdgeId], b: &[EdgeId]) -> bool {
    let (wa, wb) = (weight_of(w, a), weight_of(w, b));
    wa < wb || (wa == wb && a < b)
}

/// Best suitable subgraph different from `x` under weights `w` (by weight,
/// then sorted ids): the best over all "delete one edge of `x`" subproblems.
pub fn second_best_at(g: &ParamGraph, x: &TargetSubgraph, w: &[f64]) -> Result<Vec<EdgeId>> {
    if x.kind == TargetKind::SpanningTree {
        return second_best_tree(g, &x.edges, w);
    }
    let mut allowed = vec![true; g.num_edges()];
    let mut best: Option<Vec<EdgeId>> = None;
    for &e in &x.edges {
        allowed[e] = false;
        if let Ok(y) = optimal_masked(g, x.kind, w, &allowed) {
            if best.as_ref().map_or(true, |b| better(w, &y, b)) {
                best = Some(y);
            }
        }
        allowed[e] = true;
    }
    best.ok_or_else(|| OracleError::NoAlternative.into())
}

pub fn second_best(g: &ParamGraph, x: &TargetSubgraph, p: &[f64]) -> Result<Vec<EdgeId>> {
    second_best_at(g, x, &g.weights_at(p))
}

// If the MST differs from X it is the answer; otherwise the best single swap.
fn second_best_tree(g: &ParamGraph, x: &[EdgeId], w: &[f64]) -> Result<Vec<EdgeId>> {
    let m = mst_masked(g, w, &vec![true; g.num_edges()])?;
    if m != x {
        return Ok(m);
    }
    let rooted = RootedTree::from_graph(g, x)?;
    let lca = build_lca(&rooted);
    let ht = build_heavy_tree(&rooted, w);
    let mut in_tree = vec![false; g.num_edges()];
    for &e in x {
        in_tree[e] = true;
    }
    let non_tree: Vec<EdgeId> = (0..g.num_edges()).filter(|&f| !in_tree[f]).collect();
    let gap = |f: EdgeId| w[f] - ht.path_max(g.edge(f).u, g.edge(f).v).1;
    let best_gap = non_tree.iter().map(|&f| gap(f)).fold(f64::INFINITY, f64::min);
    if !best_gap.is_finite() {
        return Err(OracleError::NoAlternative.into());
    }
    let mut best: Option<Vec<EdgeId>> = None;
    for &f in &non_tree {
        if gap(f) != best_gap {
            continue;
        }
        let edge = g.edge(f);
        let threshold = ht.path_max(edge.u, edge.v).1;
        for e in violated_swaps_for_edge(&rooted, &lca, &ht, edge.u, edge.v, threshold) {
            let mut y: Vec<EdgeId> = x.iter().copied().filter(|&t| t != e).collect();
            y.push(f);
            y.sort_unstable();
            if best.as_ref().map_or(true, |b| better(w, &y, b)) {
                best = Some(y);
            }
        }
    }
    best.ok_or_else(|| OracleError::NoAlternative.into())
}

/// Separation oracle for `{(p, delta) : w(Y) - w(X) >= delta for all Y != X}`.
///
/// In the default mode a query where the optimum is `X` itself ends the
/// search (`Solved`, with the achieved margin); with `use_second_best` the
/// second-best subgraph is compared instead, so the oracle separates the
/// margin polyhedron exactly and the search can maximize `delta`.
pub struct SubgraphOracle {
    graph: ParamGraph,
    target: TargetSubgraph,
    cost_x: Vec<f64>,
    nonneg: bool,
    use_second_best: bool,
    subgraphs: Vec<Vec<EdgeId>>,
}

pub fn make_separation_oracle(instance: &Instance, use_second_best: bool) -> SubgraphOracle {
    let nonneg = instance.nonneg_weights || matches!(instance.target.kind, TargetKind::StPath { .. });
    SubgraphOracle {
        cost_x: subgraph_cost(&instance.graph, &instance.target.edges),
        graph: instance.graph.clone(),
        target: instance.target.clone(),
        nonneg,
        use_second_best,
        subgraphs: Vec::new(),
    }
}

impl SubgraphOracle {
    /// Subgraph behind an `Origin::Subgraph` label of a returned cut.
    pub fn subgraph(&self, label: usize) -> &[EdgeId] {
        &self.subgraphs[label]
    }

    fn cut_for(&mut self, y: Vec<EdgeId>) -> OracleReply {
        let cost_y = subgraph_cost(&self.graph, &y);
        let normal = cost_y.iter().zip(&self.cost_x).map(|(a, b)| a - b).collect();
        let label = self.subgraphs.len();
        self.subgraphs.push(y.clone());
        OracleReply::Cut {
            halfspace: LinearConstraint::new(normal, 0.0, Sense::Gt, Origin::Subgraph(label)),
            subgraph: y,
        }
    }
}

impl SeparationOracle for SubgraphOracle {
    fn dim(&self) -> usize {
        self.graph.dimension()
    }

    fn max_coefficient(&self) -> f64 {
        self.graph
            .edges()
            .iter()
            .flat_map(|e| e.cost.0.iter())
            .fold(0.0, |acc: f64, c| acc.max(c.abs()))
    }

    fn query(&mut self, p: &[f64], delta: f64) -> Result<OracleReply> {
        let w = self.graph.weights_at(p);
        if self.nonneg {
            // deepest violated non-negativity cut, lowest id on ties
            let worst = (0..w.len()).filter(|&e| w[e] < 0.0).min_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b)));
            if let Some(e) = worst {
                return Ok(OracleReply::Cut {
                    halfspace: LinearConstraint::new(
                        self.graph.cost(e).to_vec(),
                        0.0,
                        Sense::Ge,
                        Origin::NonNegative(e),
                    ),
                    subgraph: vec![e],
                });
            }
        }
        let wx = weight_of(&w, &self.target.edges);
        let second = match second_best_at(&self.graph, &self.target, &w) {
            Ok(y) => y,
            // no alternative subgraph at all: every point is feasible
            Err(Error::Oracle(OracleError::NoAlternative)) => return Ok(OracleReply::FeasibleHere),
            Err(e) => return Err(e),
        };
        if self.use_second_best {
            let y = second;
            return Ok(if weight_of(&w, &y) - wx >= delta {
                OracleReply::FeasibleHere
            } else {
                self.cut_for(y)
            });
        }
        let y = optimal_subgraph(&self.graph, self.target.kind, &w)?;
        if y == self.target.edges {
            let y2 = second;
            let gap = weight_of(&w, &y2) - wx;
            return Ok(if gap > DELTA_MIN {
                OracleReply::Solved { delta: gap }
            } else if gap < delta {
                self.cut_for(y2)
            } else {
                OracleReply::FeasibleHere
            });
        }
        Ok(if weight_of(&w, &y) - wx >= delta {
            OracleReply::FeasibleHere
        } else {
            self.cut_for(y)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_instance;

    fn fixture(name: &str) -> Instance {
        let text = match name {
            "tri1" => include_str!("../../../fixtures/tri1.json"),
            "path1" => include_str!("../../../fixtures/path1.json"),
            "match1" => include_str!("../../../fixtures/match1.json"),
            _ => include_str!("../../../fixtures/inf1.json"),
        };
        parse_instance(text).unwrap()
    }

    #[test]
    fn mst_examples() {
        let tri = fixture("tri1");
        assert_eq!(mst_at(&tri.graph, &[1.0, 1.0]).unwrap(), vec![0, 1]);
        assert_eq!(mst_at(&tri.graph, &[0.0, 0.0]).unwrap(), vec![0, 1]);
        let mut g = ParamGraph::new(3, 1).unwrap();
        g.add_edge(0, 1, vec![1.0]).unwrap();
        assert!(mst_at(&g, &[1.0]).is_err());
    }

    #[test]
    fn path_examples() {
        let path = fixture("path1");
        assert_eq!(shortest_path_at(&path.graph, 0, 2, &[0.0, 1.0]).unwrap(), vec![0, 1]);
        assert!(matches!(
            shortest_path_at(&path.graph, 0, 2, &[-1.0, 1.0]),
            Err(crate::Error::Oracle(OracleError::NegativeWeight { edge: 0, .. }))
        ));
        let mut g = ParamGraph::new(2, 1).unwrap();
        g.add_edge(0, 1, vec![2.0]).unwrap();
        assert_eq!(shortest_path_at(&g, 0, 1, &[1.0]).unwrap(), vec![0]);
    }

    #[test]
    fn zero_weight_cycles_do_not_trap_the_walk() {
        // 0-1 (id 0) and 1-0 (id 1) both zero, 0-2 zero: walk must not wander
        let mut g = ParamGraph::new(3, 1).unwrap();
        g.add_edge(1, 2, vec![1.0]).unwrap();
        g.add_edge(0, 1, vec![0.0]).unwrap();
        g.add_edge(0, 2, vec![1.0]).unwrap();
        assert_eq!(shortest_path_at(&g, 0, 2, &[0.0]).unwrap(), vec![1, 0]);
        assert_eq!(shortest_path_at(&g, 0, 2, &[1.0]).unwrap(), vec![1, 0]);
    }

    #[test]
    fn matching_examples() {
        let m = fixture("match1");
        let y = min_matching_at(&m.graph, &[-1.0, 1.0]).unwrap();
        assert_eq!(y, vec![0, 3]);
        assert_eq!(weight_of(&m.graph.weights_at(&[-1.0, 1.0]), &y), -2.0);
        let mut g = ParamGraph::new(2, 1).unwrap();
        g.add_edge(0, 1, vec![1.0]).unwrap();
        assert_eq!(min_matching_at(&g, &[1.0]).unwrap(), vec![0]);
    }

    #[test]
    fn second_best_examples() {
        let tri = fixture("tri1");
        let x = &tri.target;
        let y = second_best(&tri.graph, x, &[1.0, 1.0]).unwrap();
        assert_eq!(y, vec![0, 2]);
        assert_eq!(weight_of(&tri.graph.weights_at(&[1.0, 1.0]), &y), 3.0);
        let path = fixture("path1");
        assert_eq!(second_best(&path.graph, &path.target, &[0.0, 1.0]).unwrap(), vec![2]);
        let m = fixture("match1");
        let y = second_best(&m.graph, &m.target, &[-1.0, 1.0]).unwrap();
        assert_eq!(y, vec![1, 2]);
        assert_eq!(weight_of(&m.graph.weights_at(&[-1.0, 1.0]), &y), 2.0);
    }

    #[test]
    fn separation_replies() {
        let path = fixture("path1");
        let mut oracle = make_separation_oracle(&path, false);
        match oracle.query(&[1.0, 0.0], 0.1).unwrap() {
            OracleReply::Cut { halfspace, subgraph } => {
                assert_eq!(halfspace.normal, vec![-2.0, 3.0]);
                assert_eq!(halfspace.sense, Sense::Gt);
                assert_eq!(subgraph, vec![2]);
            }
            other => panic!("expected a cut, got {other:?}"),
        }
        assert_eq!(oracle.query(&[0.0, 1.0], 0.5).unwrap(), OracleReply::Solved { delta: 3.0 });
        let mut exact = make_separation_oracle(&path, true);
        assert_eq!(exact.query(&[0.0, 1.0], 0.5).unwrap(), OracleReply::FeasibleHere);
        assert!(matches!(exact.query(&[0.0, 1.0], 3.5).unwrap(), OracleReply::Cut { .. }));
        assert!(matches!(
            exact.query(&[-0.5, 1.0], 0.5).unwrap(),
            OracleReply::Cut { halfspace: LinearConstraint { origin: Origin::NonNegative(0), .. }, .. }
        ));
    }
}
