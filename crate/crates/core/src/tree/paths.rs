//! The path family of a multi-level partition.
//!
//! Every tree path is split into a few canonical pieces, at most two per
//! level: take the lowest level where both endpoints share a set `S`; the
//! endpoints lie in different children `X`, `Y` of `S`, which are joined by
//! a *connector* piece. Each remaining half runs from an endpoint to an exit
//! vertex of its child set; one level down it either stays in one child or
//! leaves that child through a *tail* piece ending at the exit. Level-0 sets
//! contribute all paths between pairs of their vertices.
//!
//! All pieces join two vertices of a common set, and each swap `(e, f)`
//! appears for exactly one path `i` with `e` in `A_i` and `f` in `B_i`,
//! because the pieces of a decomposition are edge-disjoint.

use std::collections::HashMap;

use super::partition::{BinaryTree, MultiLevelPartition};
use crate::graph::{EdgeId, ParamGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathKind {
    /// Two vertices of one bottom-level set.
    Pair { u: usize, v: usize },
    /// Children `x` and `y` (sets of `level`) of a common parent set.
    Connector { level: usize, x: usize, y: usize },
    /// From child `child` (a set of `level`) to exit vertex `target` of its parent.
    Tail { level: usize, child: usize, target: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreePath {
    pub kind: PathKind,
    /// Binary-tree vertices at the two ends.
    pub ends: (usize, usize),
    /// Binary-tree edges, dummies included, ordered from `ends.0`.
    pub binary_edges: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct PathFamily {
    pub paths: Vec<TreePath>,
    /// Original tree edges on each path.
    pub a: Vec<Vec<EdgeId>>,
    /// Non-tree edges whose tree path uses each path.
    pub b: Vec<Vec<EdgeId>>,
    pub bt: BinaryTree,
    pub mlp: MultiLevelPartition,
    index: HashMap<PathKind, usize>,
}

/// Exit vertices of every set at every level: inner endpoints of its
/// boundary edges.
fn exits(bt: &BinaryTree, mlp: &MultiLevelPartition, level: usize, set: usize) -> Vec<usize> {
    let mut out: Vec<usize> = mlp.levels[level].sets[set]
        .boundary
        .iter()
        .map(|&k| {
            let (u, v, _) = bt.edges[k];
            if mlp.vertex_set[level][u] == set {
                u
            } else {
                v
            }
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// The vertex of set `x` (at `level`) closest to vertex `target` outside it.
fn exit_towards(bt: &BinaryTree, mlp: &MultiLevelPartition, level: usize, x: usize, target: usize) -> usize {
    for &k in &mlp.levels[level].sets[x].boundary {
        let (u, v, _) = bt.edges[k];
        let (inner, outer) = if mlp.vertex_set[level][u] == x { (u, v) } else { (v, u) };
        let child = bt.rooted.child_of(k).expect("binary edge");
        let towards = if child == outer {
            bt.lca.is_ancestor(outer, target)
        } else {
            !bt.lca.is_ancestor(inner, target)
        };
        if towards {
            return inner;
        }
    }
    unreachable!("target lies outside the set, so some boundary edge leads to it")
}

/// Any binary vertex of set `x` at `level`.
fn some_vertex(mlp: &MultiLevelPartition, level: usize, mut x: usize) -> usize {
    for l in (0..=level).rev() {
        x = mlp.levels[l].sets[x].members[0];
    }
    x
}

impl PathFamily {
    fn add(&mut self, kind: PathKind, from: usize, to: usize) {
        if self.index.contains_key(&kind) {
            return;
        }
        let binary_edges = self.bt.path(from, to);
        let a = binary_edges.iter().filter_map(|&k| self.bt.edges[k].2).collect();
        self.index.insert(kind, self.paths.len());
        self.paths.push(TreePath {
            kind,
            ends: (from, to),
            binary_edges,
        });
        self.a.push(a);
        self.b.push(Vec::new());
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn index_of(&self, kind: &PathKind) -> Option<usize> {
        self.index.get(kind).copied()
    }

    /// Indices of the pieces of the tree path `u`–`v` (binary-tree vertices),
    /// in order from `u`. Empty when `u == v`.
    pub fn decompose_path(&self, u: usize, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        if u == v {
            return out;
        }
        let vs = &self.mlp.vertex_set;
        let top = (0..vs.len()).find(|&l| vs[l][u] == vs[l][v]).expect("top level is one set");
        if top == 0 {
            out.push(self.pair(u, v));
            return out;
        }
        let (x, y) = (vs[top - 1][u], vs[top - 1][v]);
        let conn = self.index[&PathKind::Connector {
            level: top - 1,
            x: x.min(y),
            y: x.max(y),
        }];
        let path = &self.paths[conn];
        let (xe, ye) = if vs[top - 1][path.ends.0] == x {
            path.ends
        } else {
            (path.ends.1, path.ends.0)
        };
        self.branch(top - 1, u, xe, &mut out);
        out.push(conn);
        let mut rest = Vec::new();
        self.branch(top - 1, v, ye, &mut rest);
        out.extend(rest.into_iter().rev());
        out
    }

    fn pair(&self, u: usize, v: usize) -> usize {
        self.index[&PathKind::Pair {
            u: u.min(v),
            v: u.max(v),
        }]
    }

    /// Pieces from `u` to exit `a` of the level-`level` set containing both,
    /// in order from `u`.
    fn branch(&self, mut level: usize, u: usize, a: usize, out: &mut Vec<usize>) {
        let vs = &self.mlp.vertex_set;
        let mut a = a;
        let mut tail = Vec::new();
        loop {
            if u == a {
                break;
            }
            if level == 0 {
                tail.push(self.pair(u, a));
                break;
            }
            let xu = vs[level - 1][u];
            if xu != vs[level - 1][a] {
                let i = self.index[&PathKind::Tail {
                    level: level - 1,
                    child: xu,
                    target: a,
                }];
                tail.push(i);
                a = self.paths[i].ends.0;
            }
            level -= 1;
        }
        out.extend(tail.into_iter().rev());
    }
}

/// Materializes the path family of `mlp` and fills `B` from the non-tree
/// edges of `g`. Original vertices keep their ids in `bt`.
pub fn build_path_family(g: &ParamGraph, bt: BinaryTree, mlp: MultiLevelPartition) -> PathFamily {
    let mut fam = PathFamily {
        paths: Vec::new(),
        a: Vec::new(),
        b: Vec::new(),
        bt,
        mlp,
        index: HashMap::new(),
    };
    let levels = fam.mlp.num_levels();
    for set in 0..fam.mlp.levels[0].sets.len() {
        let members = fam.mlp.levels[0].sets[set].members.clone();
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                fam.add(PathKind::Pair { u, v }, u, v);
            }
        }
    }
    for level in 1..levels {
        for set in 0..fam.mlp.levels[level].sets.len() {
            let children = fam.mlp.levels[level].sets[set].members.clone();
            for (i, &x) in children.iter().enumerate() {
                for &y in &children[i + 1..] {
                    let (x, y) = (x.min(y), x.max(y));
                    let ty = some_vertex(&fam.mlp, level - 1, y);
                    let from = exit_towards(&fam.bt, &fam.mlp, level - 1, x, ty);
                    let to = exit_towards(&fam.bt, &fam.mlp, level - 1, y, from);
                    fam.add(PathKind::Connector { level: level - 1, x, y }, from, to);
                }
            }
            for target in exits(&fam.bt, &fam.mlp, level, set) {
                for &child in &children {
                    if fam.mlp.vertex_set[level - 1][target] == child {
                        continue;
                    }
                    let from = exit_towards(&fam.bt, &fam.mlp, level - 1, child, target);
                    fam.add(
                        PathKind::Tail {
                            level: level - 1,
                            child,
                            target,
                        },
                        from,
                        target,
                    );
                }
            }
        }
    }
    let mut in_tree = vec![false; g.num_edges()];
    for &(_, _, e) in &fam.bt.edges {
        if let Some(e) = e {
            in_tree[e] = true;
        }
    }
    for (f, edge) in g.edges().iter().enumerate() {
        if in_tree[f] {
            continue;
        }
        for i in fam.decompose_path(edge.u, edge.v) {
            if !fam.a[i].is_empty() {
                fam.b[i].push(f);
            }
        }
    }
    fam
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{binarize, build_lca, multilevel_partition, RootedTree};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn family(rng: &mut ChaCha8Rng, n: usize, extra: usize, z: usize) -> (ParamGraph, RootedTree, PathFamily) {
        let mut g = ParamGraph::new(n, 1).unwrap();
        for v in 1..n {
            g.add_edge(rng.gen_range(0..v), v, vec![1.0]).unwrap();
        }
        for _ in 0..extra {
            let u = rng.gen_range(0..n);
            let v = (u + rng.gen_range(1..n)) % n;
            g.add_edge(u, v, vec![1.0]).unwrap();
        }
        let tree: Vec<EdgeId> = (0..n - 1).collect();
        let t = RootedTree::from_graph(&g, &tree).unwrap();
        let ends: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
        let bt = binarize(&t, &ends);
        let mlp = multilevel_partition(&bt, z).unwrap();
        let fam = build_path_family(&g, bt, mlp);
        (g, t, fam)
    }

    #[test]
    fn same_bottom_set_is_one_piece() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (_, _, fam) = family(&mut rng, 12, 0, 3);
        let set = fam.mlp.levels[0].sets.iter().find(|s| s.members.len() > 1).unwrap();
        let (u, v) = (set.members[0], set.members[1]);
        assert_eq!(fam.decompose_path(u, v).len(), 1);
        assert!(fam.decompose_path(u, u).is_empty());
    }

    #[test]
    fn decompositions_cover_paths_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..6 {
            let n = rng.gen_range(2..120);
            let z = rng.gen_range(2..=4);
            let (_, _, fam) = family(&mut rng, n, 0, z);
            let nb = fam.bt.num_vertices();
            let levels = fam.mlp.num_levels();
            for u in 0..nb {
                for v in 0..nb {
                    let pieces = fam.decompose_path(u, v);
                    assert!(pieces.len() <= 2 * levels.max(1));
                    let mut cur = u;
                    let mut joined = Vec::new();
                    for &i in &pieces {
                        let p = &fam.paths[i];
                        if p.ends.0 == cur {
                            joined.extend(p.binary_edges.iter().copied());
                            cur = p.ends.1;
                        } else {
                            assert_eq!(p.ends.1, cur);
                            joined.extend(p.binary_edges.iter().rev().copied());
                            cur = p.ends.0;
                        }
                    }
                    assert_eq!(cur, v);
                    assert_eq!(joined, fam.bt.path(u, v));
                }
            }
        }
    }

    #[test]
    fn swaps_appear_exactly_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let n = rng.gen_range(2..40);
            let z = rng.gen_range(2..=4);
            let (g, t, fam) = family(&mut rng, n, 2 * n, z);
            let lca = build_lca(&t);
            let mut count = HashMap::new();
            for i in 0..fam.len() {
                for &e in &fam.a[i] {
                    for &f in &fam.b[i] {
                        *count.entry((e, f)).or_insert(0) += 1;
                    }
                }
            }
            for e in 0..n - 1 {
                for f in n - 1..g.num_edges() {
                    let swap = crate::tree::is_swap(&g, &t, &lca, e, f).unwrap();
                    assert_eq!(count.get(&(e, f)).copied().unwrap_or(0), swap as usize, "({e},{f})");
                }
            }
        }
    }
}
