//! Parametric graphs: edges carry a cost vector and their weight at a
//! parameter setting `p` is the dot product `cost(e) . p`.

use std::collections::VecDeque;

use crate::error::GraphError;
use crate::scalar::Scalar;

/// Positional edge identifier. Parallel edges are told apart by index.
pub type EdgeId = usize;

/// A parameter setting `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector(pub Vec<f64>);

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Result<Self, GraphError> {
        if let Some(&value) = values.iter().find(|x| !x.is_finite()) {
            return Err(GraphError::NonFinite {
                field: "params".into(),
                value,
            });
        }
        Ok(ParamVector(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Per-parameter costs of a single edge.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector(pub Vec<f64>);

impl CostVector {
    pub fn dot(&self, p: &[f64]) -> f64 {
        self.0.iter().zip(p).map(|(c, x)| c * x).sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub cost: CostVector,
}

impl Edge {
    /// The endpoint opposite `x`.
    #[inline]
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected multigraph with `d`-dimensional edge costs.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGraph {
    num_vertices: usize,
    dimension: usize,
    edges: Vec<Edge>,
}

impl ParamGraph {
    pub fn new(num_vertices: usize, dimension: usize) -> Result<Self, GraphError> {
        if num_vertices == 0 || dimension == 0 {
            return Err(GraphError::EmptyGraph);
        }
        Ok(ParamGraph {
            num_vertices,
            dimension,
            edges: Vec::new(),
        })
    }

    /// Appends an edge and returns its id.
    pub fn add_edge(&mut self, u: usize, v: usize, cost: Vec<f64>) -> Result<EdgeId, GraphError> {
        let id = self.edges.len();
        for vertex in [u, v] {
            if vertex >= self.num_vertices {
                return Err(GraphError::InvalidVertex {
                    vertex,
                    num_vertices: self.num_vertices,
                });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop { edge: id, vertex: u });
        }
        if cost.len() != self.dimension {
            return Err(GraphError::DimensionMismatch {
                expected: self.dimension,
                found: cost.len(),
            });
        }
        if let Some(&value) = cost.iter().find(|x| !x.is_finite()) {
            return Err(GraphError::NonFinite {
                field: format!("edges[{id}].cost"),
                value,
            });
        }
        self.edges.push(Edge {
            u,
            v,
            cost: CostVector(cost),
        });
        Ok(id)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn cost(&self, e: EdgeId) -> &[f64] {
        &self.edges[e].cost.0
    }

    /// Weights of every edge at `p`. The caller guarantees `p.len() == d`.
    pub fn weights_at(&self, p: &[f64]) -> Vec<f64> {
        debug_assert_eq!(p.len(), self.dimension);
        self.edges.iter().map(|e| e.cost.dot(p)).collect()
    }

    /// Sum of the absolute values of all cost coefficients.
    pub fn total_abs_cost(&self) -> f64 {
        self.edges
            .iter()
            .flat_map(|e| e.cost.0.iter())
            .map(|c| c.abs())
            .sum()
    }

    /// Adjacency lists of `(neighbor, edge id)` pairs.
    pub fn adjacency(&self) -> Vec<Vec<(usize, EdgeId)>> {
        let mut adj = vec![Vec::new(); self.num_vertices];
        for (id, e) in self.edges.iter().enumerate() {
            adj[e.u].push((e.v, id));
            adj[e.v].push((e.u, id));
        }
        adj
    }

    /// A 2-coloring of the vertices, if the graph is bipartite.
    pub fn two_coloring(&self) -> Option<Vec<bool>> {
        let adj = self.adjacency();
        let mut color: Vec<Option<bool>> = vec![None; self.num_vertices];
        let mut queue = VecDeque::new();
        for start in 0..self.num_vertices {
            if color[start].is_some() {
                continue;
            }
            color[start] = Some(false);
            queue.push_back(start);
            while let Some(x) = queue.pop_front() {
                let cx = color[x].unwrap();
                for &(y, _) in &adj[x] {
                    match color[y] {
                        None => {
                            color[y] = Some(!cx);
                            queue.push_back(y);
                        }
                        Some(cy) if cy == cx => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(color.into_iter().map(|c| c.unwrap()).collect())
    }

    fn check_dim(&self, p: &[f64]) -> Result<(), GraphError> {
        if p.len() != self.dimension {
            return Err(GraphError::DimensionMismatch {
                expected: self.dimension,
                found: p.len(),
            });
        }
        Ok(())
    }
}

/// `cost(e) . p`.
pub fn edge_weight(g: &ParamGraph, e: EdgeId, p: &ParamVector) -> Result<f64, GraphError> {
    g.check_dim(&p.0)?;
    if e >= g.num_edges() {
        return Err(GraphError::InvalidEdge(e));
    }
    Ok(g.edges[e].cost.dot(&p.0))
}

/// Exact or floating weight of `e`, computed in the scalar type `S`.
pub fn edge_weight_in<S: Scalar>(g: &ParamGraph, e: EdgeId, p: &[S]) -> S {
    g.cost(e)
        .iter()
        .zip(p)
        .fold(S::zero(), |acc, (c, x)| acc + S::from_f64(*c) * x.clone())
}

/// Total weight of the edges in `edges`; zero for the empty set.
pub fn subgraph_weight(g: &ParamGraph, edges: &[EdgeId], p: &ParamVector) -> Result<f64, GraphError> {
    g.check_dim(&p.0)?;
    let mut total = 0.0;
    for &e in edges {
        if e >= g.num_edges() {
            return Err(GraphError::InvalidEdge(e));
        }
        total += g.edges[e].cost.dot(&p.0);
    }
    Ok(total)
}

/// Sum of the cost vectors of `edges`.
pub fn subgraph_cost(g: &ParamGraph, edges: &[EdgeId]) -> Vec<f64> {
    let mut acc = vec![0.0; g.dimension()];
    for &e in edges {
        for (a, c) in acc.iter_mut().zip(g.cost(e)) {
            *a += c;
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetKind {
    SpanningTree,
    StPath { source: usize, dest: usize },
    PerfectMatching,
}

impl TargetKind {
    pub fn name(&self) -> &'static str {
        match self {
            TargetKind::SpanningTree => "spanning_tree",
            TargetKind::StPath { .. } => "st_path",
            TargetKind::PerfectMatching => "perfect_matching",
        }
    }
}

/// The desired optimal subgraph `X`. Edge ids are kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSubgraph {
    pub kind: TargetKind,
    pub edges: Vec<EdgeId>,
}

impl TargetSubgraph {
    pub fn new(kind: TargetKind, mut edges: Vec<EdgeId>) -> Self {
        edges.sort_unstable();
        TargetSubgraph { kind, edges }
    }

    pub fn spanning_tree(edges: Vec<EdgeId>) -> Self {
        Self::new(TargetKind::SpanningTree, edges)
    }

    /// Membership bitmap over the edges of a graph with `m` edges.
    pub fn mask(&self, m: usize) -> Vec<bool> {
        let mut mask = vec![false; m];
        for &e in &self.edges {
            if e < m {
                mask[e] = true;
            }
        }
        mask
    }
}

/// Checks that `t` is a structurally valid subgraph of its kind in `g`.
pub fn validate_target(g: &ParamGraph, t: &TargetSubgraph) -> Result<(), GraphError> {
    let n = g.num_vertices();
    let mut seen = vec![false; g.num_edges()];
    for &e in &t.edges {
        if e >= g.num_edges() {
            return Err(GraphError::InvalidEdge(e));
        }
        if seen[e] {
            return Err(GraphError::DuplicateTargetEdge(e));
        }
        seen[e] = true;
    }
    match t.kind {
        TargetKind::SpanningTree => {
            if t.edges.len() != n - 1 {
                return Err(GraphError::WrongEdgeCount {
                    expected: n - 1,
                    found: t.edges.len(),
                });
            }
            let mut dsu = Dsu::new(n);
            for &e in &t.edges {
                let edge = g.edge(e);
                if !dsu.union(edge.u, edge.v) {
                    return Err(GraphError::TreeHasCycle);
                }
            }
            // n - 1 acyclic edges always connect; kept for clarity of errors
            if dsu.components() != 1 {
                return Err(GraphError::TreeNotConnected);
            }
            Ok(())
        }
        TargetKind::StPath { source, dest } => {
            if source >= n || dest >= n || source == dest {
                return Err(GraphError::BadEndpoints {
                    source_vertex: source,
                    dest,
                });
            }
            let mut incident: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
            for &e in &t.edges {
                let edge = g.edge(e);
                incident[edge.u].push(e);
                incident[edge.v].push(e);
            }
            let mut used = vec![false; g.num_edges()];
            let mut visited = vec![false; n];
            let mut at = source;
            let mut steps = 0;
            visited[at] = true;
            while at != dest {
                let next = incident[at].iter().copied().find(|&e| !used[e]);
                let Some(e) = next else {
                    return Err(GraphError::NotSimplePath);
                };
                if incident[at].iter().filter(|&&f| !used[f]).count() != 1 {
                    return Err(GraphError::NotSimplePath);
                }
                used[e] = true;
                at = g.edge(e).other(at);
                if visited[at] {
                    return Err(GraphError::NotSimplePath);
                }
                visited[at] = true;
                steps += 1;
            }
            if steps != t.edges.len() {
                return Err(GraphError::NotSimplePath);
            }
            Ok(())
        }
        TargetKind::PerfectMatching => {
            if g.two_coloring().is_none() {
                return Err(GraphError::NotBipartite);
            }
            let mut covered = vec![0usize; n];
            for &e in &t.edges {
                let edge = g.edge(e);
                covered[edge.u] += 1;
                covered[edge.v] += 1;
            }
            if let Some(v) = covered.iter().position(|&c| c != 1) {
                return Err(GraphError::NotPerfectMatching(v));
            }
            Ok(())
        }
    }
}

/// A graph, its target subgraph and the optional non-negativity requirement.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: ParamGraph,
    pub target: TargetSubgraph,
    pub nonneg_weights: bool,
}

impl Instance {
    pub fn new(graph: ParamGraph, target: TargetSubgraph, nonneg_weights: bool) -> Result<Self, GraphError> {
        validate_target(&graph, &target)?;
        Ok(Instance {
            graph,
            target,
            nonneg_weights,
        })
    }

    pub fn dimension(&self) -> usize {
        self.graph.dimension()
    }
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            size: vec![1; n],
            components: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri1() -> ParamGraph {
        let mut g = ParamGraph::new(3, 2).unwrap();
        g.add_edge(0, 1, vec![1.0, 0.0]).unwrap();
        g.add_edge(1, 2, vec![0.0, 1.0]).unwrap();
        g.add_edge(0, 2, vec![1.0, 1.0]).unwrap();
        g
    }

    #[test]
    fn edge_weight_examples() {
        let g = tri1();
        assert_eq!(edge_weight(&g, 0, &ParamVector(vec![3.0, 5.0])).unwrap(), 3.0);
        let mut z = ParamGraph::new(2, 2).unwrap();
        z.add_edge(0, 1, vec![0.0, 0.0]).unwrap();
        assert_eq!(edge_weight(&z, 0, &ParamVector(vec![7.0, -2.0])).unwrap(), 0.0);
        let p = ParamVector(vec![2.0, -1.0]);
        let w = edge_weight(&g, 2, &p).unwrap();
        let by_coordinate = g.cost(2)[0] * p.0[0] + g.cost(2)[1] * p.0[1];
        assert_eq!(w, 1.0);
        assert_eq!(w, by_coordinate);
    }

    #[test]
    fn edge_weight_rejects_wrong_dimension() {
        let g = tri1();
        assert_eq!(
            edge_weight(&g, 0, &ParamVector(vec![1.0])),
            Err(GraphError::DimensionMismatch { expected: 2, found: 1 })
        );
        assert_eq!(
            edge_weight(&g, 9, &ParamVector(vec![1.0, 1.0])),
            Err(GraphError::InvalidEdge(9))
        );
    }

    #[test]
    fn subgraph_weight_examples() {
        let g = tri1();
        let p = ParamVector(vec![1.0, 1.0]);
        assert_eq!(subgraph_weight(&g, &[], &p).unwrap(), 0.0);
        assert_eq!(subgraph_weight(&g, &[0, 1], &p).unwrap(), 2.0);
        assert!(subgraph_weight(&g, &[3], &p).is_err());
    }

    #[test]
    fn validate_spanning_tree() {
        let g = tri1();
        assert!(validate_target(&g, &TargetSubgraph::spanning_tree(vec![0, 1])).is_ok());
        assert_eq!(
            validate_target(&g, &TargetSubgraph::spanning_tree(vec![0])),
            Err(GraphError::WrongEdgeCount { expected: 2, found: 1 })
        );
        let mut h = ParamGraph::new(4, 1).unwrap();
        h.add_edge(0, 1, vec![1.0]).unwrap();
        h.add_edge(1, 2, vec![1.0]).unwrap();
        h.add_edge(0, 2, vec![1.0]).unwrap();
        h.add_edge(2, 3, vec![1.0]).unwrap();
        assert_eq!(
            validate_target(&h, &TargetSubgraph::spanning_tree(vec![0, 1, 2])),
            Err(GraphError::TreeHasCycle)
        );
        assert_eq!(
            validate_target(&tri1(), &TargetSubgraph::spanning_tree(vec![0, 0])),
            Err(GraphError::DuplicateTargetEdge(0))
        );
    }

    #[test]
    fn validate_path_and_matching() {
        let mut g = ParamGraph::new(3, 2).unwrap();
        g.add_edge(0, 1, vec![1.0, 0.0]).unwrap();
        g.add_edge(1, 2, vec![1.0, 0.0]).unwrap();
        g.add_edge(0, 2, vec![0.0, 3.0]).unwrap();
        let path = |edges| TargetSubgraph::new(TargetKind::StPath { source: 0, dest: 2 }, edges);
        assert!(validate_target(&g, &path(vec![0, 1])).is_ok());
        assert!(validate_target(&g, &path(vec![2])).is_ok());
        assert_eq!(validate_target(&g, &path(vec![0])), Err(GraphError::NotSimplePath));
        assert_eq!(validate_target(&g, &path(vec![0, 1, 2])), Err(GraphError::NotSimplePath));

        let mut k22 = ParamGraph::new(4, 1).unwrap();
        for (u, v) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            k22.add_edge(u, v, vec![1.0]).unwrap();
        }
        let m = |edges| TargetSubgraph::new(TargetKind::PerfectMatching, edges);
        assert!(validate_target(&k22, &m(vec![0, 3])).is_ok());
        assert_eq!(validate_target(&k22, &m(vec![0, 2])), Err(GraphError::NotPerfectMatching(2)));
        assert_eq!(
            validate_target(&tri1(), &m(vec![0])),
            Err(GraphError::NotBipartite)
        );
    }

    #[test]
    fn add_edge_errors() {
        let mut g = ParamGraph::new(2, 1).unwrap();
        assert_eq!(g.add_edge(0, 0, vec![1.0]), Err(GraphError::SelfLoop { edge: 0, vertex: 0 }));
        assert!(matches!(g.add_edge(0, 5, vec![1.0]), Err(GraphError::InvalidVertex { .. })));
        assert!(matches!(g.add_edge(0, 1, vec![1.0, 2.0]), Err(GraphError::DimensionMismatch { .. })));
        assert!(matches!(g.add_edge(0, 1, vec![f64::NAN]), Err(GraphError::NonFinite { .. })));
    }
}
