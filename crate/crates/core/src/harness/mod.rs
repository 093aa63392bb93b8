//! Instance generators with known ground truth, the named fixtures, and an
//! independent optimality check.

pub mod brute;

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, GraphError, OracleError, Result};
use crate::graph::{EdgeId, Instance, ParamGraph, TargetKind, TargetSubgraph};
use crate::io::parse_instance;
use crate::lp::DELTA_MIN;
use crate::oracles::{optimal_subgraph, second_best_at, weight_of, NEGATIVE_WEIGHT_TOL};
use crate::tree::{build_heavy_tree, build_lca, violated_swaps_for_edge, RootedTree};

/// Relative size of the cost perturbation that makes the planted optimum
/// strictly unique.
pub const TIE_PERTURBATION: f64 = 1e-6;

const FIXTURES: [(&str, &str); 4] = [
    ("tri1", include_str!("../../../../fixtures/tri1.json")),
    ("inf1", include_str!("../../../../fixtures/inf1.json")),
    ("path1", include_str!("../../../../fixtures/path1.json")),
    ("match1", include_str!("../../../../fixtures/match1.json")),
];

pub fn fixture_names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(n, _)| *n)
}

/// One of the shipped fixtures, by (case-insensitive) name.
pub fn fixture(name: &str) -> Option<Instance> {
    let lower = name.to_ascii_lowercase();
    FIXTURES
        .iter()
        .find(|(n, _)| *n == lower)
        .map(|(_, text)| parse_instance(text).expect("shipped fixtures are valid"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    SpanningTree,
    StPath,
    PerfectMatching,
}

impl GenKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "spanning_tree" => Some(GenKind::SpanningTree),
            "st_path" => Some(GenKind::StPath),
            "perfect_matching" => Some(GenKind::PerfectMatching),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenMode {
    /// The target is the optimum at a hidden `p*`, made strictly unique.
    FeasibleByConstruction,
    /// A parallel copy of a target edge with identical cost: `0 > 0`.
    InfeasibleGadget,
    /// The optimum at `p*` for independently jittered costs; no guarantee.
    Random,
}

impl GenMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "feasible" | "feasible_by_construction" => Some(GenMode::FeasibleByConstruction),
            "infeasible" | "infeasible_gadget" => Some(GenMode::InfeasibleGadget),
            "random" => Some(GenMode::Random),
            _ => None,
        }
    }
}

/// Generator input. For matchings the graph is complete bipartite and `m`
/// is ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub seed: u64,
    pub mode: GenMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub instance: Instance,
    /// The planted parameter vector, for `FeasibleByConstruction`.
    pub hidden: Option<Vec<f64>>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

fn check_spec(spec: &GenSpec) -> Result<()> {
    if spec.d == 0 || spec.d > 64 {
        return Err(invalid("d must lie in 1..=64"));
    }
    if spec.n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    let gadget = usize::from(spec.mode == GenMode::InfeasibleGadget);
    match spec.kind {
        GenKind::PerfectMatching => {
            if spec.n % 2 == 1 {
                return Err(invalid(format!("a perfect matching needs an even n, got {}", spec.n)));
            }
        }
        _ => {
            let pairs = spec.n * (spec.n - 1) / 2;
            if spec.m < spec.n - 1 + gadget {
                return Err(invalid(format!("m = {} is too small for n = {}", spec.m, spec.n)));
            }
            if spec.m - gadget > pairs {
                return Err(invalid(format!("m = {} exceeds the {pairs} vertex pairs", spec.m)));
            }
        }
    }
    Ok(())
}

/// Random connected simple graph: a random spanning tree plus distinct
/// extra pairs, edges in random order.
fn topology(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<(usize, usize)> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut pairs: HashSet<(usize, usize)> = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    for i in 1..n {
        let (a, b) = (perm[i], perm[rng.gen_range(0..i)]);
        pairs.insert((a.min(b), a.max(b)));
        edges.push((a, b));
    }
    if m - edges.len() > n * (n - 1) / 4 {
        // dense: enumerate the complement instead of rejection sampling
        let mut rest: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|p| !pairs.contains(p))
            .collect();
        rest.shuffle(rng);
        edges.extend(rest.into_iter().take(m - (n - 1)));
    } else {
        while edges.len() < m {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b && pairs.insert((a.min(b), a.max(b))) {
                edges.push((a, b));
            }
        }
    }
    edges.shuffle(rng);
    edges
}

fn draw_vec(rng: &mut ChaCha8Rng, d: usize, nonneg: bool) -> Vec<f64> {
    (0..d)
        .map(|_| if nonneg { rng.gen_range(0.0..1.0) } else { rng.gen_range(-1.0..1.0) })
        .collect()
}

fn build(n: usize, d: usize, edges: &[(usize, usize)], costs: &[Vec<f64>]) -> Result<ParamGraph> {
    let mut g = ParamGraph::new(n, d)?;
    for (&(u, v), c) in edges.iter().zip(costs) {
        g.add_edge(u, v, c.clone())?;
    }
    Ok(g)
}

pub fn gen_instance(spec: &GenSpec) -> Result<Generated> {
    check_spec(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n, d) = (spec.n, spec.d);
    let gadget = spec.mode == GenMode::InfeasibleGadget;
    let nonneg = spec.kind == GenKind::StPath;
    let edges: Vec<(usize, usize)> = match spec.kind {
        GenKind::PerfectMatching => {
            let h = n / 2;
            let mut e: Vec<(usize, usize)> = (0..h).flat_map(|u| (h..n).map(move |v| (u, v))).collect();
            e.shuffle(&mut rng);
            e
        }
        _ => topology(&mut rng, n, spec.m - usize::from(gadget)),
    };
    let mut costs: Vec<Vec<f64>> = (0..edges.len()).map(|_| draw_vec(&mut rng, d, nonneg)).collect();
    let p_star = draw_vec(&mut rng, d, nonneg);
    let kind = match spec.kind {
        GenKind::SpanningTree => TargetKind::SpanningTree,
        GenKind::StPath => TargetKind::StPath { source: 0, dest: n - 1 },
        GenKind::PerfectMatching => TargetKind::PerfectMatching,
    };

    let target_costs = if spec.mode == GenMode::Random {
        costs
            .iter()
            .map(|c| c.iter().map(|x| (x + rng.gen_range(-0.25..0.25)).max(if nonneg { 0.0 } else { -2.0 })).collect())
            .collect()
    } else {
        costs.clone()
    };
    let g = build(n, d, &edges, &target_costs)?;
    let x = optimal_subgraph(&g, kind, &g.weights_at(&p_star))?;

    if spec.mode == GenMode::FeasibleByConstruction {
        // raise every non-target edge by a small multiple of sign(p*)
        let in_x: HashSet<EdgeId> = x.iter().copied().collect();
        let scale = costs.iter().flatten().fold(0.0f64, |m, c| m.max(c.abs()));
        let eta = TIE_PERTURBATION * (1.0 + scale);
        for (e, c) in costs.iter_mut().enumerate() {
            if !in_x.contains(&e) {
                for (cj, pj) in c.iter_mut().zip(&p_star) {
                    *cj += eta * if *pj >= 0.0 { 1.0 } else { -1.0 };
                }
            }
        }
    }
    let mut edges = edges;
    if gadget {
        let copy = x[rng.gen_range(0..x.len())];
        edges.push(edges[copy]);
        costs.push(costs[copy].clone());
    }
    let g = build(n, d, &edges, &costs)?;
    let instance = Instance::new(g, TargetSubgraph::new(kind, x), nonneg)?;
    Ok(Generated {
        instance,
        hidden: (spec.mode == GenMode::FeasibleByConstruction).then_some(p_star),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Swap { tree: EdgeId, other: EdgeId },
    Subgraph(Vec<EdgeId>),
    NegativeWeight(EdgeId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub feasible: bool,
    /// Smallest `w(Y) - w(X)` over alternatives `Y`; `+inf` without any.
    pub delta_achieved: f64,
    pub violated: Vec<Violation>,
}

impl VerifyReport {
    pub fn to_json(&self) -> Value {
        let violated: Vec<Value> = self
            .violated
            .iter()
            .map(|v| match v {
                Violation::Swap { tree, other } => json!({ "tree": tree, "other": other }),
                Violation::Subgraph(edges) => json!({ "edges": edges }),
                Violation::NegativeWeight(e) => json!({ "nonnegative": e }),
            })
            .collect();
        json!({
            "feasible": self.feasible,
            "delta_achieved": self.delta_achieved.is_finite().then_some(self.delta_achieved),
            "violated": violated,
        })
    }
}

/// Checks whether the target is the unique optimum at `p`. Spanning trees
/// are checked swap by swap; the other kinds through the optimization and
/// second-best oracles. Alternatives within `DELTA_MIN` count as violated.
pub fn verify(instance: &Instance, p: &[f64]) -> Result<VerifyReport> {
    let g = &instance.graph;
    if p.len() != g.dimension() {
        return Err(GraphError::DimensionMismatch {
            expected: g.dimension(),
            found: p.len(),
        }
        .into());
    }
    let w = g.weights_at(p);
    let x = &instance.target;
    let nonneg = instance.nonneg_weights || matches!(x.kind, TargetKind::StPath { .. });
    if nonneg {
        let negative: Vec<EdgeId> = (0..w.len()).filter(|&e| w[e] < -NEGATIVE_WEIGHT_TOL).collect();
        if !negative.is_empty() {
            let worst = negative.iter().map(|&e| w[e]).fold(f64::INFINITY, f64::min);
            return Ok(VerifyReport {
                feasible: false,
                delta_achieved: worst,
                violated: negative.into_iter().map(Violation::NegativeWeight).collect(),
            });
        }
    }
    if x.kind == TargetKind::SpanningTree {
        return verify_tree(g, &x.edges, &w);
    }
    let wx = weight_of(&w, &x.edges);
    let y = optimal_subgraph(g, x.kind, &w)?;
    let (gap, y) = if y != x.edges {
        (weight_of(&w, &y) - wx, Some(y))
    } else {
        match second_best_at(g, x, &w) {
            Ok(y2) => (weight_of(&w, &y2) - wx, Some(y2)),
            Err(Error::Oracle(OracleError::NoAlternative)) => (f64::INFINITY, None),
            Err(e) => return Err(e),
        }
    };
    let feasible = gap > DELTA_MIN;
    Ok(VerifyReport {
        feasible,
        delta_achieved: gap,
        violated: if feasible { vec![] } else { y.into_iter().map(Violation::Subgraph).collect() },
    })
}

fn verify_tree(g: &ParamGraph, tree: &[EdgeId], w: &[f64]) -> Result<VerifyReport> {
    let rooted = RootedTree::from_graph(g, tree)?;
    let lca = build_lca(&rooted);
    let ht = build_heavy_tree(&rooted, w);
    let mut in_tree = vec![tree.is_empty(); g.num_edges()];
    for &e in tree {
        in_tree[e] = true;
    }
    let mut delta = f64::INFINITY;
    let mut violated = Vec::new();
    for f in (0..g.num_edges()).filter(|&f| !in_tree[f]) {
        let edge = g.edge(f);
        delta = delta.min(w[f] - ht.path_max(edge.u, edge.v).1);
        let mut es = violated_swaps_for_edge(&rooted, &lca, &ht, edge.u, edge.v, w[f] - DELTA_MIN);
        es.sort_unstable();
        violated.extend(es.into_iter().map(|e| Violation::Swap { tree: e, other: f }));
    }
    Ok(VerifyReport {
        feasible: violated.is_empty(),
        delta_achieved: delta,
        violated,
    })
}
