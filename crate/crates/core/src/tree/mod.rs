//! Rooted spanning trees and the structures built on them.

mod heavy;
mod lca;
mod partition;
mod paths;

pub use heavy::{build_heavy_tree, violated_swaps_for_edge, HeavyEdgeTree};
pub use lca::{build_lca, lca_query, LcaIndex};
pub use partition::{
    binarize, check_partition, multilevel_partition, restricted_partition, BinaryTree, ClauseViolation, Level,
    MultiLevelPartition, PartSet,
};
pub use paths::{build_path_family, PathFamily, PathKind, TreePath};

use crate::error::{Error, GraphError};
use crate::graph::{EdgeId, ParamGraph};

/// Marker for "no vertex" / "no edge".
pub const NONE: usize = usize::MAX;

/// A spanning tree rooted at `root`, with parent pointers and BFS order.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedTree {
    pub root: usize,
    pub parent: Vec<usize>,
    pub parent_edge: Vec<EdgeId>,
    pub depth: Vec<usize>,
    /// Vertices in BFS order from the root.
    pub order: Vec<usize>,
    /// For each edge id, the deeper endpoint if the edge is in the tree.
    edge_child: Vec<usize>,
}

impl RootedTree {
    /// Roots the tree formed by `tree` (ids into `endpoints`) at `root`.
    pub fn new(n: usize, endpoints: &[(usize, usize)], tree: &[EdgeId], root: usize) -> Result<Self, GraphError> {
        if tree.len() + 1 != n {
            return Err(GraphError::WrongEdgeCount {
                expected: n.saturating_sub(1),
                found: tree.len(),
            });
        }
        let mut adj = vec![Vec::new(); n];
        for &e in tree {
            let (u, v) = *endpoints.get(e).ok_or(GraphError::InvalidEdge(e))?;
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        let mut parent = vec![NONE; n];
        let mut parent_edge = vec![NONE; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut edge_child = vec![NONE; endpoints.len()];
        seen[root] = true;
        order.push(root);
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &(v, e) in &adj[u] {
                if e == parent_edge[u] {
                    continue;
                }
                if seen[v] {
                    return Err(GraphError::TreeHasCycle);
                }
                seen[v] = true;
                parent[v] = u;
                parent_edge[v] = e;
                depth[v] = depth[u] + 1;
                edge_child[e] = v;
                order.push(v);
            }
        }
        if order.len() != n {
            return Err(GraphError::TreeNotConnected);
        }
        Ok(RootedTree {
            root,
            parent,
            parent_edge,
            depth,
            order,
            edge_child,
        })
    }

    /// Roots the target tree of `g` at vertex 0.
    pub fn from_graph(g: &ParamGraph, tree: &[EdgeId]) -> Result<Self, GraphError> {
        let endpoints: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
        RootedTree::new(g.num_vertices(), &endpoints, tree, 0)
    }

    pub fn num_vertices(&self) -> usize {
        self.parent.len()
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edge_child.get(e).is_some_and(|&c| c != NONE)
    }

    /// Lower endpoint of tree edge `e`.
    pub fn child_of(&self, e: EdgeId) -> Option<usize> {
        self.edge_child.get(e).copied().filter(|&c| c != NONE)
    }

    /// Tree edges in BFS order of their child endpoint.
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.order[1..].iter().map(|&v| self.parent_edge[v])
    }

    /// Edge ids on the tree path between `u` and `v`, from `u` towards `v`.
    pub fn path_edges(&self, lca: &LcaIndex, u: usize, v: usize) -> Vec<EdgeId> {
        let w = lca.lca(u, v);
        let mut up = Vec::new();
        let mut x = u;
        while x != w {
            up.push(self.parent_edge[x]);
            x = self.parent[x];
        }
        let mut down = Vec::new();
        let mut y = v;
        while y != w {
            down.push(self.parent_edge[y]);
            y = self.parent[y];
        }
        up.extend(down.into_iter().rev());
        up
    }
}

/// True iff removing tree edge `e` and adding non-tree edge `f = (fu, fv)`
/// yields a spanning tree, i.e. `e` lies on the cycle `f` closes.
pub fn is_swap_between(t: &RootedTree, lca: &LcaIndex, e: EdgeId, fu: usize, fv: usize) -> bool {
    match t.child_of(e) {
        Some(c) => lca.is_ancestor(c, fu) != lca.is_ancestor(c, fv),
        None => false,
    }
}

/// [`is_swap_between`] with the contract checks on edge membership.
pub fn is_swap(g: &ParamGraph, t: &RootedTree, lca: &LcaIndex, e: EdgeId, f: EdgeId) -> Result<bool, Error> {
    if e >= g.num_edges() || f >= g.num_edges() {
        return Err(GraphError::InvalidEdge(e.max(f)).into());
    }
    if !t.contains_edge(e) {
        return Err(Error::Contract(format!("edge {e} is not a tree edge")));
    }
    if t.contains_edge(f) {
        return Err(Error::Contract(format!("edge {f} is a tree edge")));
    }
    let fe = g.edge(f);
    Ok(is_swap_between(t, lca, e, fe.u, fe.v))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn graph(n: usize, edges: &[(usize, usize)]) -> ParamGraph {
        let mut g = ParamGraph::new(n, 1).unwrap();
        for &(u, v) in edges {
            g.add_edge(u, v, vec![1.0]).unwrap();
        }
        g
    }

    #[test]
    fn rooting_and_paths() {
        let g = graph(4, &[(0, 1), (1, 2), (1, 3), (2, 3)]);
        let t = RootedTree::from_graph(&g, &[0, 1, 2]).unwrap();
        assert_eq!(t.depth, vec![0, 1, 2, 2]);
        assert_eq!(t.child_of(1), Some(2));
        assert_eq!(t.child_of(3), None);
        let lca = build_lca(&t);
        assert_eq!(t.path_edges(&lca, 2, 3), vec![1, 2]);
        assert_eq!(t.path_edges(&lca, 0, 0), Vec::<EdgeId>::new());
    }

    #[test]
    fn rejects_non_trees() {
        let g = graph(3, &[(0, 1), (1, 0), (1, 2)]);
        assert_eq!(RootedTree::from_graph(&g, &[0, 1]), Err(GraphError::TreeHasCycle));
        assert_eq!(RootedTree::from_graph(&g, &[0]).unwrap_err(), GraphError::WrongEdgeCount { expected: 2, found: 1 });
    }

    #[test]
    fn swap_examples() {
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let t = RootedTree::from_graph(&g, &[0, 1]).unwrap();
        let lca = build_lca(&t);
        assert!(is_swap(&g, &t, &lca, 0, 2).unwrap());

        let g = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2)]);
        let t = RootedTree::from_graph(&g, &[0, 1, 2]).unwrap();
        let lca = build_lca(&t);
        assert!(!is_swap(&g, &t, &lca, 2, 3).unwrap());
        assert!(is_swap(&g, &t, &lca, 0, 3).unwrap());
        assert!(matches!(is_swap(&g, &t, &lca, 3, 3), Err(Error::Contract(_))));
        assert!(matches!(is_swap(&g, &t, &lca, 0, 1), Err(Error::Contract(_))));
    }
}
