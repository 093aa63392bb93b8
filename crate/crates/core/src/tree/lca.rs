//! Lowest common ancestors by Euler tour and a sparse table of depth minima.

use super::{RootedTree, NONE};
use crate::error::GraphError;

#[derive(Debug, Clone, PartialEq)]
pub struct LcaIndex {
    depth: Vec<u32>,
    first: Vec<u32>,
    last: Vec<u32>,
    /// `table[j][i]`: shallowest vertex of `euler[i..i + 2^j]`.
    table: Vec<Vec<u32>>,
}

impl LcaIndex {
    /// Builds the index over the forest given by parent pointers; `NONE`
    /// marks roots. Children are visited in increasing vertex order.
    pub fn from_parents(parent: &[usize]) -> Self {
        let n = parent.len();
        let mut start = vec![0u32; n + 1];
        for &p in parent {
            if p != NONE {
                start[p + 1] += 1;
            }
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut children = vec![0u32; start[n] as usize];
        for (v, &p) in parent.iter().enumerate() {
            if p != NONE {
                children[fill[p] as usize] = v as u32;
                fill[p] += 1;
            }
        }

        let mut depth = vec![0u32; n];
        let mut first = vec![0u32; n];
        let mut last = vec![0u32; n];
        let mut euler: Vec<u32> = Vec::with_capacity(2 * n);
        let mut stack: Vec<(u32, u32)> = Vec::new();
        for root in (0..n).filter(|&v| parent[v] == NONE) {
            stack.push((root as u32, start[root]));
            first[root] = euler.len() as u32;
            euler.push(root as u32);
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                let v = v as usize;
                if *next < start[v + 1] {
                    let c = children[*next as usize];
                    *next += 1;
                    depth[c as usize] = depth[v] + 1;
                    first[c as usize] = euler.len() as u32;
                    euler.push(c);
                    stack.push((c, start[c as usize]));
                } else {
                    last[v] = euler.len() as u32 - 1;
                    stack.pop();
                    if let Some(&(p, _)) = stack.last() {
                        euler.push(p);
                    }
                }
            }
        }

        let mut table = vec![euler];
        let mut span = 1;
        while 2 * span <= table[0].len() {
            let prev = table.last().expect("level");
            let row: Vec<u32> = (0..prev.len() - span)
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + span]);
                    if depth[b as usize] < depth[a as usize] {
                        b
                    } else {
                        a
                    }
                })
                .collect();
            table.push(row);
            span *= 2;
        }
        LcaIndex {
            depth,
            first,
            last,
            table,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.depth.len()
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v] as usize
    }

    /// Deepest common ancestor of `u` and `v` (both in the same tree).
    #[inline]
    pub fn lca(&self, u: usize, v: usize) -> usize {
        let (mut i, mut j) = (self.first[u] as usize, self.first[v] as usize);
        if i > j {
            std::mem::swap(&mut i, &mut j);
        }
        let len = j - i + 1;
        let level = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let row = &self.table[level];
        let (a, b) = (row[i], row[j + 1 - (1 << level)]);
        if self.depth[b as usize] < self.depth[a as usize] {
            b as usize
        } else {
            a as usize
        }
    }

    /// True iff `a` is an ancestor of `b` (every vertex is its own ancestor).
    #[inline]
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        self.first[a] <= self.first[b] && self.last[b] <= self.last[a]
    }
}

pub fn build_lca(t: &RootedTree) -> LcaIndex {
    LcaIndex::from_parents(&t.parent)
}

pub fn lca_query(idx: &LcaIndex, u: usize, v: usize) -> Result<usize, GraphError> {
    let n = idx.num_vertices();
    for x in [u, v] {
        if x >= n {
            return Err(GraphError::InvalidVertex {
                vertex: x,
                num_vertices: n,
            });
        }
    }
    Ok(idx.lca(u, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive(parent: &[usize], mut u: usize, mut v: usize) -> usize {
        let depth = |mut x: usize| {
            let mut d = 0;
            while parent[x] != NONE {
                x = parent[x];
                d += 1;
            }
            d
        };
        let (mut du, mut dv) = (depth(u), depth(v));
        while du > dv {
            u = parent[u];
            du -= 1;
        }
        while dv > du {
            v = parent[v];
            dv -= 1;
        }
        while u != v {
            u = parent[u];
            v = parent[v];
        }
        u
    }

    #[test]
    fn star_and_self() {
        let idx = LcaIndex::from_parents(&[NONE, 0, 0, 0]);
        assert_eq!(lca_query(&idx, 1, 2), Ok(0));
        for v in 0..4 {
            assert_eq!(idx.lca(v, v), v);
        }
        assert!(lca_query(&idx, 0, 9).is_err());
    }

    #[test]
    fn random_trees_match_parent_walk() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(1..=50);
            let parent: Vec<usize> = (0..n).map(|v| if v == 0 { NONE } else { rng.gen_range(0..v) }).collect();
            let idx = LcaIndex::from_parents(&parent);
            for u in 0..n {
                for v in 0..n {
                    let w = naive(&parent, u, v);
                    assert_eq!(idx.lca(u, v), w);
                    assert_eq!(idx.is_ancestor(w, u) && idx.is_ancestor(w, v), true);
                }
            }
        }
    }
}
