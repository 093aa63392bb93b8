//! One LP over every swap constraint.

use num_rational::BigRational;

use super::{swap_constraint, Decision, Problem};
use crate::error::Result;
use crate::graph::{EdgeId, ParamGraph};
use crate::lp::{self, LinearConstraint};
use crate::outcome::SolveOutcome;
use crate::scalar::Scalar;

pub(crate) fn swaps_of(p: &Problem) -> Vec<(EdgeId, EdgeId)> {
    let mut swaps = Vec::new();
    for &f in &p.non_tree {
        let edge = p.g.edge(f);
        for e in p.rooted.path_edges(&p.lca, edge.u, edge.v) {
            swaps.push((e, f));
        }
    }
    swaps.sort_unstable();
    swaps
}

/// One `(cost(f) - cost(e)) . p > 0` constraint per swap, ordered by `(e, f)`.
pub fn all_swap_constraints(g: &ParamGraph, tree: &[EdgeId]) -> Result<Vec<LinearConstraint>> {
    let p = Problem::new(g, tree)?;
    Ok(swaps_of(&p).into_iter().map(|(e, f)| swap_constraint(g, e, f)).collect())
}

pub fn solve_naive(g: &ParamGraph, tree: &[EdgeId]) -> Result<SolveOutcome> {
    let p = Problem::new(g, tree)?;
    let constraints: Vec<LinearConstraint> = swaps_of(&p).into_iter().map(|(e, f)| swap_constraint(g, e, f)).collect();
    Ok(match p.decide(&constraints, 0)? {
        Decision::Feasible { params, delta } => p.finish(params, delta),
        Decision::Infeasible(out) => out,
    })
}

/// [`solve_naive`] in exact rational arithmetic: feasible iff the maximal
/// margin is positive. Parameters are rounded to `f64` on output.
pub fn solve_naive_exact(g: &ParamGraph, tree: &[EdgeId]) -> Result<SolveOutcome> {
    let p = Problem::new(g, tree)?;
    let constraints: Vec<LinearConstraint> = swaps_of(&p).into_iter().map(|(e, f)| swap_constraint(g, e, f)).collect();
    let d = p.dim();
    let (feasible, point, basis) = lp::solve_strict_exact::<BigRational>(&constraints, d, p.cap, 0)?;
    if feasible {
        let values: Vec<f64> = point.iter().map(Scalar::to_f64).collect();
        return Ok(SolveOutcome::feasible(values[..d].to_vec(), values[d]));
    }
    let mut kept = basis;
    let mut i = 0;
    while i < kept.len() && kept.len() > 1 {
        let mut trial = kept.clone();
        trial.remove(i);
        let sub: Vec<LinearConstraint> = trial.iter().map(|&j| constraints[j].clone()).collect();
        if !lp::solve_strict_exact::<BigRational>(&sub, d, p.cap, 0)?.0 {
            kept = trial;
        } else {
            i += 1;
        }
    }
    Ok(SolveOutcome::infeasible(p.witness(&constraints, &kept)))
}
