//! Inverse parametric optimization for any supported subgraph kind: the
//! ellipsoid search over the subgraph oracle, followed by an independent
//! check at the returned point.

use crate::ellipsoid::{ellipsoid_maximize_delta, EllipsoidOptions, EllipsoidReport};
use crate::error::{Error, OracleError, Result};
use crate::graph::{validate_target, Instance, TargetKind};
use crate::lp::{delta_cap_for, DELTA_MIN};
use crate::oracles::{make_separation_oracle, optimal_subgraph, second_best_at, weight_of};
use crate::outcome::SolveOutcome;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveOptions {
    /// Compare against the second-best subgraph at every query, so the
    /// returned margin is the maximal one; otherwise stop at the first
    /// point where the target is the unique optimum.
    pub use_second_best: bool,
    pub max_iters: Option<usize>,
    pub seed: u64,
}

pub fn solve_inverse(instance: &Instance, options: &SolveOptions) -> Result<SolveOutcome> {
    Ok(solve_inverse_with_report(instance, options)?.0)
}

pub fn solve_inverse_with_report(instance: &Instance, options: &SolveOptions) -> Result<(SolveOutcome, EllipsoidReport)> {
    let g = &instance.graph;
    validate_target(g, &instance.target)?;
    let mut oracle = make_separation_oracle(instance, options.use_second_best);
    let opts = EllipsoidOptions {
        max_iters: options.max_iters,
        delta_cap: delta_cap_for(g.total_abs_cost()),
        seed: options.seed,
    };
    let (out, report) = ellipsoid_maximize_delta(&mut oracle, &opts)?;
    let Some(p) = out.params.as_ref().filter(|_| out.is_feasible()) else {
        return Ok((out, report));
    };

    // re-check uniqueness at p with the plain oracles
    let w = g.weights_at(p);
    let nonneg = instance.nonneg_weights || matches!(instance.target.kind, TargetKind::StPath { .. });
    let signs_ok = !nonneg || w.iter().all(|&x| x >= 0.0);
    let wx = weight_of(&w, &instance.target.edges);
    let gap = match second_best_at(g, &instance.target, &w) {
        Ok(y) => weight_of(&w, &y) - wx,
        Err(Error::Oracle(OracleError::NoAlternative)) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    let unique = signs_ok && gap > DELTA_MIN && optimal_subgraph(g, instance.target.kind, &w)? == instance.target.edges;
    if !unique {
        return Err(Error::Indeterminate {
            iterations: report.iterations,
            best_point: Some(p.clone()),
            best_delta: out.delta,
        });
    }
    let delta = out.delta.map_or(gap, |d| d.min(gap));
    Ok((SolveOutcome::feasible(p.clone(), delta), report))
}
