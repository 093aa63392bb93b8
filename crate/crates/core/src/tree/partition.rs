//! Restricted and multi-level partitions of binary trees.
//!
//! A restricted partition of order `z` splits the vertices of a tree of
//! maximum degree three into connected sets of at most `z` vertices, each
//! set with more than one vertex having at most two tree edges leaving it,
//! such that no two adjacent sets can be merged. Contracting the sets gives
//! another tree of maximum degree three, which is partitioned again until a
//! single set remains.

use super::{LcaIndex, RootedTree, NONE};
use crate::error::Error;
use crate::graph::{Dsu, EdgeId};

/// A tree of maximum degree three obtained from a spanning tree by
/// splitting high-degree vertices into chains joined by dummy edges.
/// Vertices `0..num_original` are the original vertices.
#[derive(Debug, Clone)]
pub struct BinaryTree {
    pub num_original: usize,
    /// `(u, v, original edge)`; `None` marks a dummy edge.
    pub edges: Vec<(usize, usize, Option<EdgeId>)>,
    pub rooted: RootedTree,
    pub lca: LcaIndex,
}

impl BinaryTree {
    pub fn num_vertices(&self) -> usize {
        self.rooted.num_vertices()
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.num_vertices()];
        for (k, &(u, v, _)) in self.edges.iter().enumerate() {
            adj[u].push((v, k));
            adj[v].push((u, k));
        }
        adj
    }

    /// Binary edges on the path `u`–`v`, from `u` towards `v`.
    pub fn path(&self, u: usize, v: usize) -> Vec<usize> {
        self.rooted.path_edges(&self.lca, u, v)
    }
}

/// Splits every vertex of degree `k > 3` into a chain of `k - 2` vertices.
/// The first chain vertex keeps the original id.
pub fn binarize(t: &RootedTree, endpoints: &[(usize, usize)]) -> BinaryTree {
    let n = t.num_vertices();
    let tree: Vec<EdgeId> = t.edges().collect();
    let mut incident = vec![Vec::new(); n];
    for (slot, &e) in tree.iter().enumerate() {
        let (u, v) = endpoints[e];
        incident[u].push((slot, 0));
        incident[v].push((slot, 1));
    }
    let mut ends: Vec<[usize; 2]> = tree.iter().map(|&e| [endpoints[e].0, endpoints[e].1]).collect();
    let mut edges: Vec<(usize, usize, Option<EdgeId>)> = Vec::with_capacity(2 * n);
    let mut next = n;
    for v in 0..n {
        let k = incident[v].len();
        if k <= 3 {
            continue;
        }
        let chain: Vec<usize> = std::iter::once(v).chain(next..next + k - 3).collect();
        next += k - 3;
        for w in chain.windows(2) {
            edges.push((w[0], w[1], None));
        }
        for (j, &(slot, side)) in incident[v].iter().enumerate() {
            let at = match j {
                0 | 1 => 0,
                _ if j >= k - 2 => k - 3,
                _ => j - 1,
            };
            ends[slot][side] = chain[at];
        }
    }
    let mut all: Vec<(usize, usize, Option<EdgeId>)> =
        tree.iter().zip(&ends).map(|(&e, end)| (end[0], end[1], Some(e))).collect();
    all.extend(edges);
    let pairs: Vec<(usize, usize)> = all.iter().map(|&(u, v, _)| (u, v)).collect();
    let ids: Vec<usize> = (0..all.len()).collect();
    let rooted = RootedTree::new(next, &pairs, &ids, 0).expect("binarized tree is a tree");
    let lca = LcaIndex::from_parents(&rooted.parent);
    BinaryTree {
        num_original: n,
        edges: all,
        rooted,
        lca,
    }
}

/// Greedy restricted partition of order `z` of the tree with adjacency
/// lists `adj` (a connected tree of maximum degree three). Sets are
/// returned sorted, each set's members sorted.
pub fn restricted_partition(adj: &[Vec<usize>], z: usize) -> Result<Vec<Vec<usize>>, Error> {
    if z < 2 {
        return Err(Error::Contract(format!("partition order must be at least 2, got {z}")));
    }
    let n = adj.len();
    if n == 0 {
        return Ok(vec![]);
    }
    let mut parent = vec![NONE; n];
    let mut order = vec![0];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = u;
                order.push(v);
            }
        }
    }
    if order.len() != n {
        return Err(Error::Contract("partition input is not a connected tree".into()));
    }

    let mut dsu = Dsu::new(n);
    let mut size = vec![1usize; n];
    let mut degsum: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut try_merge = |dsu: &mut Dsu, a: usize, b: usize| {
        let (ra, rb) = (dsu.find(a), dsu.find(b));
        if ra == rb {
            return false;
        }
        let s = size[ra] + size[rb];
        let d = degsum[ra] + degsum[rb];
        if s > z || d - 2 * (s - 1) > 2 {
            return false;
        }
        dsu.union(ra, rb);
        let r = dsu.find(ra);
        size[r] = s;
        degsum[r] = d;
        true
    };

    let bottom_up: Vec<usize> = order.iter().rev().copied().filter(|&v| parent[v] != NONE).collect();
    for &v in &bottom_up {
        try_merge(&mut dsu, v, parent[v]);
    }
    loop {
        let mut changed = false;
        for &v in &bottom_up {
            changed |= try_merge(&mut dsu, v, parent[v]);
        }
        if !changed {
            break;
        }
    }

    let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        let r = dsu.find(v);
        by_root[r].push(v);
    }
    let mut sets: Vec<Vec<usize>> = by_root.into_iter().filter(|s| !s.is_empty()).collect();
    sets.sort_unstable();
    Ok(sets)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClauseViolation {
    NotAPartition,
    TooLarge { set: usize },
    Disconnected { set: usize },
    TooManyBoundaryEdges { set: usize },
    NotMaximal { a: usize, b: usize },
}

/// Checks the four defining clauses of a restricted partition.
pub fn check_partition(adj: &[Vec<usize>], sets: &[Vec<usize>], z: usize) -> Result<(), ClauseViolation> {
    let n = adj.len();
    let mut owner = vec![NONE; n];
    for (i, s) in sets.iter().enumerate() {
        for &v in s {
            if v >= n || owner[v] != NONE {
                return Err(ClauseViolation::NotAPartition);
            }
            owner[v] = i;
        }
    }
    if owner.contains(&NONE) {
        return Err(ClauseViolation::NotAPartition);
    }
    let boundary = |i: usize| -> usize {
        sets[i]
            .iter()
            .map(|&v| adj[v].iter().filter(|&&w| owner[w] != i).count())
            .sum()
    };
    for (i, s) in sets.iter().enumerate() {
        if s.len() > z {
            return Err(ClauseViolation::TooLarge { set: i });
        }
        let mut seen = vec![s[0]];
        let mut stack = vec![s[0]];
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if owner[w] == i && !seen.contains(&w) {
                    seen.push(w);
                    stack.push(w);
                }
            }
        }
        if seen.len() != s.len() {
            return Err(ClauseViolation::Disconnected { set: i });
        }
        if s.len() > 1 && boundary(i) > 2 {
            return Err(ClauseViolation::TooManyBoundaryEdges { set: i });
        }
    }
    for u in 0..n {
        for &w in &adj[u] {
            let (a, b) = (owner[u], owner[w]);
            if a < b {
                let merged_size = sets[a].len() + sets[b].len();
                let merged_boundary = boundary(a) + boundary(b) - 2;
                if merged_size <= z && merged_boundary <= 2 {
                    return Err(ClauseViolation::NotMaximal { a, b });
                }
            }
        }
    }
    Ok(())
}

/// One set of a partition level.
#[derive(Debug, Clone, PartialEq)]
pub struct PartSet {
    /// Nodes of the level below: binary-tree vertices at level 0, sets of
    /// the previous level above.
    pub members: Vec<usize>,
    /// Binary-tree edges with exactly one endpoint inside the set.
    pub boundary: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub sets: Vec<PartSet>,
    /// Node of the level below → set of this level.
    pub node_set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiLevelPartition {
    pub z: usize,
    pub levels: Vec<Level>,
    /// `vertex_set[l][v]`: the level-`l` set containing binary vertex `v`.
    pub vertex_set: Vec<Vec<usize>>,
}

impl MultiLevelPartition {
    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }
}

pub fn multilevel_partition(bt: &BinaryTree, z: usize) -> Result<MultiLevelPartition, Error> {
    if z < 2 {
        return Err(Error::Contract(format!("partition order must be at least 2, got {z}")));
    }
    let nv = bt.num_vertices();
    let mut levels = Vec::new();
    let mut vertex_set: Vec<Vec<usize>> = Vec::new();
    // node of the current level for every binary vertex
    let mut node_of: Vec<usize> = (0..nv).collect();
    let mut num_nodes = nv;
    loop {
        let mut adj = vec![Vec::new(); num_nodes];
        for &(u, v, _) in &bt.edges {
            let (a, b) = (node_of[u], node_of[v]);
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let sets = restricted_partition(&adj, z)?;
        let mut node_set = vec![NONE; num_nodes];
        for (i, s) in sets.iter().enumerate() {
            for &x in s {
                node_set[x] = i;
            }
        }
        let vs: Vec<usize> = node_of.iter().map(|&x| node_set[x]).collect();
        let mut parts: Vec<PartSet> = sets
            .into_iter()
            .map(|members| PartSet {
                members,
                boundary: Vec::new(),
            })
            .collect();
        for (k, &(u, v, _)) in bt.edges.iter().enumerate() {
            let (a, b) = (vs[u], vs[v]);
            if a != b {
                parts[a].boundary.push(k);
                parts[b].boundary.push(k);
            }
        }
        let count = parts.len();
        levels.push(Level { sets: parts, node_set });
        node_of = vs.clone();
        vertex_set.push(vs);
        if count <= 1 {
            break;
        }
        if count == num_nodes {
            return Err(Error::Contract("partition level made no progress".into()));
        }
        num_nodes = count;
    }
    Ok(MultiLevelPartition {
        z,
        levels,
        vertex_set,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn adj_of(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    #[test]
    fn path_of_six_order_two() {
        let adj = adj_of(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]);
        let sets = restricted_partition(&adj, 2).unwrap();
        assert!(sets.len() <= 5);
        assert_eq!(check_partition(&adj, &sets, 2), Ok(()));
    }

    #[test]
    fn singleton_and_bad_order() {
        let sets = restricted_partition(&[vec![]], 2).unwrap();
        assert_eq!(sets, vec![vec![0]]);
        assert!(restricted_partition(&[vec![]], 1).is_err());
    }

    #[test]
    fn checker_catches_each_clause() {
        let adj = adj_of(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(check_partition(&adj, &[vec![0, 1, 2], vec![3]], 2), Err(ClauseViolation::TooLarge { set: 0 }));
        assert_eq!(check_partition(&adj, &[vec![0, 2], vec![1], vec![3]], 2), Err(ClauseViolation::Disconnected { set: 0 }));
        assert_eq!(
            check_partition(&adj, &[vec![0], vec![1], vec![2], vec![3]], 2),
            Err(ClauseViolation::NotMaximal { a: 0, b: 1 })
        );
        let star = adj_of(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(
            check_partition(&star, &[vec![0, 1, 2, 3]], 4),
            Ok(())
        );
        let spider = adj_of(5, &[(0, 1), (0, 2), (2, 3), (0, 4)]);
        assert_eq!(
            check_partition(&spider, &[vec![0, 2], vec![1], vec![3], vec![4]], 2),
            Err(ClauseViolation::TooManyBoundaryEdges { set: 0 })
        );
        assert_eq!(check_partition(&adj, &[vec![0, 1]], 2), Err(ClauseViolation::NotAPartition));
    }

    fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> RootedTree {
        let ends: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
        let ids: Vec<EdgeId> = (0..n - 1).collect();
        RootedTree::new(n, &ends, &ids, 0).unwrap()
    }

    #[test]
    fn binarize_caps_degree_and_keeps_paths() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = rng.gen_range(2..60);
            let ends: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v.min(3)), v)).collect();
            let ids: Vec<EdgeId> = (0..n - 1).collect();
            let t = RootedTree::new(n, &ends, &ids, 0).unwrap();
            let lca = crate::tree::build_lca(&t);
            let bt = binarize(&t, &ends);
            assert!(bt.adjacency().iter().all(|a| a.len() <= 3));
            for u in 0..n {
                for v in 0..n {
                    let mut via: Vec<EdgeId> = bt.path(u, v).into_iter().filter_map(|k| bt.edges[k].2).collect();
                    via.sort_unstable();
                    let mut direct = t.path_edges(&lca, u, v);
                    direct.sort_unstable();
                    assert_eq!(via, direct);
                }
            }
        }
    }

    #[test]
    fn multilevel_levels_are_valid_partitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let n = rng.gen_range(1..200);
            let z = rng.gen_range(2..=4);
            let t = random_tree(&mut rng, n);
            let ends: Vec<(usize, usize)> = (0..n.saturating_sub(1))
                .map(|e| {
                    let c = t.child_of(e).unwrap();
                    (t.parent[c], c)
                })
                .collect();
            let bt = binarize(&t, &ends);
            let mlp = multilevel_partition(&bt, z).unwrap();
            assert_eq!(mlp.levels.last().unwrap().sets.len(), 1);
            let mut node_of: Vec<usize> = (0..bt.num_vertices()).collect();
            let mut count = bt.num_vertices();
            for level in &mlp.levels {
                let mut adj = vec![Vec::new(); count];
                for &(u, v, _) in &bt.edges {
                    let (a, b) = (node_of[u], node_of[v]);
                    if a != b {
                        adj[a].push(b);
                        adj[b].push(a);
                    }
                }
                let sets: Vec<Vec<usize>> = level.sets.iter().map(|s| s.members.clone()).collect();
                assert_eq!(check_partition(&adj, &sets, z), Ok(()));
                for s in &level.sets {
                    assert!(s.members.len() == 1 || s.boundary.len() <= 2);
                }
                node_of = node_of.iter().map(|&x| level.node_set[x]).collect();
                count = level.sets.len();
            }
        }
    }
}
