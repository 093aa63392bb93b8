//! Inverse parametric minimum spanning tree.
//!
//! `T` is the unique MST at `p` iff every swap `(e, f)` — `e` in `T`, `f`
//! outside, `e` on the cycle `f` closes — has `w(f) > w(e)`. All solvers
//! here maximize the common margin `delta` of these constraints over the
//! box and return the lexicographically smallest maximizer, so they agree
//! on the point, not just on the verdict.

mod deterministic;
mod linear;
mod naive;
mod randomized;

pub use deterministic::{
    epsilon_net, net_size, solve_deterministic, solve_deterministic_with_config, solve_deterministic_with_report,
    DeterministicConfig, DeterministicReport,
};
pub use linear::{
    contract_tree_edges, find_violating_tree_edges, sample_violation_count, solve_linear, Contracted,
};
pub use naive::{all_swap_constraints, solve_naive, solve_naive_exact};
pub use randomized::solve_randomized;

use crate::error::Result;
use crate::graph::{validate_target, EdgeId, ParamGraph, TargetSubgraph};
use crate::lp::{self, LinearConstraint, Origin, Sense, StrictOutcome};
use crate::outcome::{SolveOutcome, WitnessEntry, WitnessKind};
use crate::tree::{build_heavy_tree, build_lca, LcaIndex, RootedTree};

/// Margin below the LP optimum still accepted as "satisfied" when scanning
/// for violated swaps.
pub(crate) const SCAN_TOL: f64 = 1e-9;

/// Largest parameter dimension the MST solvers accept.
pub const MAX_PARAMS: usize = lp::MAX_DIM - 1;

pub(crate) fn swap_constraint(g: &ParamGraph, e: EdgeId, f: EdgeId) -> LinearConstraint {
    let normal = g.cost(f).iter().zip(g.cost(e)).map(|(a, b)| a - b).collect();
    LinearConstraint::new(normal, 0.0, Sense::Gt, Origin::Swap { tree: e, other: f })
}

/// A validated spanning-tree instance with its rooted tree.
pub(crate) struct Problem<'a> {
    pub g: &'a ParamGraph,
    pub tree: Vec<EdgeId>,
    pub non_tree: Vec<EdgeId>,
    pub rooted: RootedTree,
    pub lca: LcaIndex,
    pub cap: f64,
}

impl<'a> Problem<'a> {
    pub fn new(g: &'a ParamGraph, tree: &[EdgeId]) -> Result<Self> {
        Problem::with_cap(g, tree, lp::delta_cap_for(g.total_abs_cost()))
    }

    pub fn with_cap(g: &'a ParamGraph, tree: &[EdgeId], cap: f64) -> Result<Self> {
        if g.dimension() > MAX_PARAMS {
            return Err(crate::error::LpError::TooManyVariables(g.dimension() + 1).into());
        }
        let target = TargetSubgraph::spanning_tree(tree.to_vec());
        validate_target(g, &target)?;
        let in_tree = target.mask(g.num_edges());
        let non_tree = (0..g.num_edges()).filter(|&f| !in_tree[f]).collect();
        let rooted = RootedTree::from_graph(g, &target.edges)?;
        let lca = build_lca(&rooted);
        Ok(Problem {
            g,
            tree: target.edges,
            non_tree,
            rooted,
            lca,
            cap,
        })
    }

    pub fn dim(&self) -> usize {
        self.g.dimension()
    }

    /// `T + f - e`, sorted.
    pub fn alternative_tree(&self, e: EdgeId, f: EdgeId) -> Vec<EdgeId> {
        let mut edges: Vec<EdgeId> = self.tree.iter().copied().filter(|&x| x != e).collect();
        edges.push(f);
        edges.sort_unstable();
        edges
    }

    pub fn witness(&self, constraints: &[LinearConstraint], basis: &[usize]) -> Vec<WitnessEntry> {
        basis
            .iter()
            .map(|&i| {
                let c = &constraints[i];
                let edges = match c.origin {
                    Origin::Swap { tree, other } => self.alternative_tree(tree, other),
                    _ => vec![],
                };
                WitnessEntry {
                    kind: WitnessKind::Subgraph,
                    edges,
                    constraint: c.clone(),
                }
            })
            .collect()
    }

    /// Smallest `w(f) - w(e)` over all swaps, `+inf` without swaps.
    pub fn min_gap(&self, p: &[f64]) -> f64 {
        if self.tree.is_empty() {
            return f64::INFINITY;
        }
        let w = self.g.weights_at(p);
        let ht = build_heavy_tree(&self.rooted, &w);
        self.non_tree
            .iter()
            .map(|&f| {
                let edge = self.g.edge(f);
                w[f] - ht.path_max(edge.u, edge.v).1
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Solves the strict system and converts the result.
    pub fn decide(&self, constraints: &[LinearConstraint], seed: u64) -> Result<Decision> {
        Ok(match lp::solve_strict(constraints, self.dim(), self.cap, seed)? {
            StrictOutcome::Feasible { params, delta, .. } => Decision::Feasible { params, delta },
            StrictOutcome::Infeasible { basis, .. } => {
                Decision::Infeasible(SolveOutcome::infeasible(self.witness(constraints, &basis)))
            }
        })
    }

    /// Final outcome at an optimum of the full system; the reported margin
    /// is the one actually achieved over all swaps.
    pub fn finish(&self, params: Vec<f64>, delta: f64) -> SolveOutcome {
        let achieved = self.min_gap(&params).min(delta);
        SolveOutcome::feasible(params, achieved)
    }
}

pub(crate) enum Decision {
    Feasible { params: Vec<f64>, delta: f64 },
    Infeasible(SolveOutcome),
}

/// `w(f) - w(e)` falls short of `delta` by more than the scan tolerance.
#[inline]
pub(crate) fn scan_slack(delta: f64) -> f64 {
    delta - SCAN_TOL * (1.0 + delta.abs())
}
