//! Auxiliary tree for heaviest-edge queries.
//!
//! Leaves are the vertices of `T`; every internal node is a tree edge, with
//! children the two components it separates once all heavier edges are
//! removed. The lowest common ancestor of two leaves is therefore the
//! heaviest edge on their tree path. The structure is assembled bottom-up,
//! merging components in increasing edge order, which yields exactly the
//! tree obtained by splitting recursively on the heaviest edge.

use std::cmp::Ordering;

use super::{LcaIndex, RootedTree, NONE};
use crate::error::Error;
use crate::graph::{Dsu, EdgeId};

#[derive(Debug, Clone)]
pub struct HeavyEdgeTree {
    n: usize,
    /// Internal node `n + i` stands for tree edge `edge[i]`.
    edge: Vec<EdgeId>,
    weight: Vec<f64>,
    /// Deeper endpoint of `edge[i]` in the rooted tree.
    child: Vec<usize>,
    parent: Vec<usize>,
    lca: LcaIndex,
}

/// Key order: heavier last; among equal weights the lowest id last, so that
/// it ends up as the ancestor and wins ties.
fn key_cmp(wa: f64, ea: EdgeId, wb: f64, eb: EdgeId) -> Ordering {
    wa.total_cmp(&wb).then(eb.cmp(&ea))
}

pub fn build_heavy_tree(t: &RootedTree, weights: &[f64]) -> HeavyEdgeTree {
    let n = t.num_vertices();
    let mut items: Vec<(f64, EdgeId, usize)> = t.order[1..]
        .iter()
        .map(|&v| (weights[t.parent_edge[v]], t.parent_edge[v], v))
        .collect();
    items.sort_unstable_by(|a, b| key_cmp(a.0, a.1, b.0, b.1));

    let total = 2 * n - 1;
    let mut parent = vec![NONE; total];
    let mut top: Vec<usize> = (0..n).collect();
    let mut dsu = Dsu::new(n);
    let mut edge = Vec::with_capacity(n.saturating_sub(1));
    let mut weight = Vec::with_capacity(n.saturating_sub(1));
    let mut child = Vec::with_capacity(n.saturating_sub(1));
    for (w, e, c) in items {
        let (a, b) = (dsu.find(c), dsu.find(t.parent[c]));
        let node = n + edge.len();
        parent[top[a]] = node;
        parent[top[b]] = node;
        dsu.union(a, b);
        top[dsu.find(a)] = node;
        edge.push(e);
        weight.push(w);
        child.push(c);
    }
    let lca = LcaIndex::from_parents(&parent);
    HeavyEdgeTree {
        n,
        edge,
        weight,
        child,
        parent,
        lca,
    }
}

impl HeavyEdgeTree {
    #[inline]
    fn max_node(&self, u: usize, v: usize) -> usize {
        self.lca.lca(u, v) - self.n
    }

    /// Heaviest edge on the tree path `u`–`v` (ties to the lowest id).
    pub fn path_max_edge(&self, u: usize, v: usize) -> Result<EdgeId, Error> {
        if u == v {
            return Err(Error::Contract("path_max_edge needs distinct endpoints".into()));
        }
        if u >= self.n || v >= self.n {
            return Err(Error::Contract(format!("vertex out of range for {} vertices", self.n)));
        }
        Ok(self.edge[self.max_node(u, v)])
    }

    /// Heaviest edge and its weight on the path `u`–`v`, `u != v`.
    #[inline]
    pub fn path_max(&self, u: usize, v: usize) -> (EdgeId, f64) {
        let i = self.max_node(u, v);
        (self.edge[i], self.weight[i])
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    /// Parent pointers over leaves `0..n` and internal nodes `n..2n-1`.
    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    /// Tree edge of internal node `n + i`.
    pub fn node_edge(&self, i: usize) -> EdgeId {
        self.edge[i]
    }
}

/// Tree edges `e` on the path `fu`–`fv` with `w(e) >= threshold`, found by
/// splitting the path at its heaviest edge until the maximum drops below
/// the threshold. For a non-tree edge `f` use `threshold = w(f) - slack`.
pub fn violated_swaps_for_edge(
    t: &RootedTree,
    tlca: &LcaIndex,
    ht: &HeavyEdgeTree,
    fu: usize,
    fv: usize,
    threshold: f64,
) -> Vec<EdgeId> {
    let mut out = Vec::new();
    let mut stack = vec![(fu, fv)];
    while let Some((u, v)) = stack.pop() {
        if u == v {
            continue;
        }
        let i = ht.max_node(u, v);
        if ht.weight[i] < threshold {
            continue;
        }
        out.push(ht.edge[i]);
        let c = ht.child[i];
        let p = t.parent[c];
        if tlca.is_ancestor(c, u) {
            stack.push((u, c));
            stack.push((p, v));
        } else {
            stack.push((u, p));
            stack.push((c, v));
        }
    }
    out
}
