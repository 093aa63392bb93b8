//! Iterative reweighting over the path family.
//!
//! Every swap `(e, f)` shows up as `e` in `A_i`, `f` in `B_i` for exactly one
//! path `i` of the family, so `T` is optimal iff `max w(A_i) < min w(B_i)`
//! (by a margin `delta`) on every path. Each round solves the LP on the swaps
//! between small ε-nets of every `A_i` and `B_i`; if some path is still
//! violated, every member lying outside its net's range has its cost doubled,
//! so members of a base gain weight fast while the total grows slowly.
//!
//! Nets are cost-proportional random samples, so the method is Monte Carlo;
//! after the iteration cap it falls back to the single full LP.

use std::collections::HashSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{scan_slack, solve_naive, swap_constraint, Decision, Problem};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, ParamGraph};
use crate::lp::LinearConstraint;
use crate::outcome::SolveOutcome;
use crate::tree::{binarize, build_path_family, multilevel_partition};

/// Sample size of a random ε-net for vertical segments against hyperplanes
/// in `d + 1` dimensions.
pub fn net_size(d: usize, eps: f64) -> usize {
    (8.0 * (d as f64 + 1.0) / eps * (4.0 / eps).ln()).ceil() as usize
}

fn sample_net(log_costs: &[u32], size: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if log_costs.len() <= size {
        return (0..log_costs.len()).collect();
    }
    let top = *log_costs.iter().max().expect("non-empty");
    let weights: Vec<f64> = log_costs.iter().map(|&c| (c as f64 - top as f64).exp2()).collect();
    let dist = WeightedIndex::new(&weights).expect("positive weights");
    let mut picked: Vec<usize> = (0..size).map(|_| dist.sample(rng)).collect();
    picked.sort_unstable();
    picked.dedup();
    picked
}

/// Indices of a cost-proportional random sample of `items` (hyperplane
/// coefficients, positive cost) intended as an ε-net for vertical segments.
/// Returns everything when there are no more items than the sample size.
pub fn epsilon_net(items: &[(Vec<f64>, f64)], eps: f64, seed: u64) -> Result<Vec<usize>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Contract(format!("eps must lie in (0, 1), got {eps}")));
    }
    if let Some(i) = items.iter().position(|(_, c)| !(*c > 0.0 && c.is_finite())) {
        return Err(Error::Contract(format!("item {i} has a non-positive cost")));
    }
    let d = items.first().map_or(1, |(h, _)| h.len());
    let size = net_size(d, eps);
    if items.len() <= size {
        return Ok((0..items.len()).collect());
    }
    let weights: Vec<f64> = items.iter().map(|(_, c)| *c).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::Contract(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<usize> = (0..size).map(|_| dist.sample(&mut rng)).collect();
    picked.sort_unstable();
    picked.dedup();
    Ok(picked)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicReport {
    pub z: usize,
    pub eps: f64,
    pub num_paths: usize,
    pub iteration_cap: usize,
    /// LP rounds performed before terminating (or hitting the cap).
    pub iterations: usize,
    pub fallback: bool,
    /// Total family cost after / before each doubling step.
    pub growth: Vec<f64>,
}

/// Knobs of the deterministic solver; `None` picks the standard value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DeterministicConfig {
    /// Partition order, default `max(2, floor(sqrt(m / n)))`.
    pub z: Option<usize>,
    /// Net precision, default `1 / 3d`.
    pub eps: Option<f64>,
    /// Overrides the ε-net sample size (smaller nets force reweighting).
    pub net_size: Option<usize>,
}

pub fn solve_deterministic(g: &ParamGraph, tree: &[EdgeId], z: Option<usize>, seed: u64) -> Result<SolveOutcome> {
    Ok(solve_deterministic_with_report(g, tree, z, seed)?.0)
}

pub fn solve_deterministic_with_report(
    g: &ParamGraph,
    tree: &[EdgeId],
    z: Option<usize>,
    seed: u64,
) -> Result<(SolveOutcome, DeterministicReport)> {
    solve_deterministic_with_config(g, tree, &DeterministicConfig { z, ..Default::default() }, seed)
}

/// Sum of `2^c`, scaled by `2^-top`.
fn scaled_total(costs: &[Vec<u32>], top: u32) -> f64 {
    costs.iter().flatten().map(|&c| (c as f64 - top as f64).exp2()).sum()
}

pub fn solve_deterministic_with_config(
    g: &ParamGraph,
    tree: &[EdgeId],
    config: &DeterministicConfig,
    seed: u64,
) -> Result<(SolveOutcome, DeterministicReport)> {
    let p = Problem::new(g, tree)?;
    let n = g.num_vertices();
    let m = g.num_edges();
    let d = p.dim();
    let z = config.z.unwrap_or_else(|| ((m as f64 / n as f64).sqrt().floor() as usize).max(2));
    let eps = config.eps.unwrap_or(1.0 / (3.0 * d as f64));
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Contract(format!("eps must lie in (0, 1), got {eps}")));
    }
    let size = config.net_size.unwrap_or_else(|| net_size(d, eps)).max(1);
    let iteration_cap = 64 * d * (n.max(2) as f64).log2().ceil() as usize;
    let mut report = DeterministicReport {
        z,
        eps,
        num_paths: 0,
        iteration_cap,
        iterations: 0,
        fallback: false,
        growth: vec![],
    };
    if p.tree.is_empty() || p.non_tree.is_empty() {
        return Ok((solve_naive(g, tree)?, report));
    }

    let endpoints: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    let bt = binarize(&p.rooted, &endpoints);
    let mlp = multilevel_partition(&bt, z)?;
    let fam = build_path_family(g, bt, mlp);
    report.num_paths = fam.len();
    let active: Vec<usize> = (0..fam.len()).filter(|&i| !fam.a[i].is_empty() && !fam.b[i].is_empty()).collect();
    let mut cost_a: Vec<Vec<u32>> = active.iter().map(|&i| vec![0; fam.a[i].len()]).collect();
    let mut cost_b: Vec<Vec<u32>> = active.iter().map(|&i| vec![0; fam.b[i].len()]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for it in 0..iteration_cap {
        report.iterations = it + 1;
        let mut nets = Vec::with_capacity(active.len());
        let mut swaps: HashSet<(EdgeId, EdgeId)> = HashSet::new();
        for (k, &i) in active.iter().enumerate() {
            let na: Vec<EdgeId> = sample_net(&cost_a[k], size, &mut rng).into_iter().map(|j| fam.a[i][j]).collect();
            let nb: Vec<EdgeId> = sample_net(&cost_b[k], size, &mut rng).into_iter().map(|j| fam.b[i][j]).collect();
            for &e in &na {
                for &f in &nb {
                    swaps.insert((e, f));
                }
            }
            nets.push((na, nb));
        }
        let mut swaps: Vec<(EdgeId, EdgeId)> = swaps.into_iter().collect();
        swaps.sort_unstable();
        let constraints: Vec<LinearConstraint> = swaps.iter().map(|&(e, f)| swap_constraint(g, e, f)).collect();
        let (params, delta) = match p.decide(&constraints, seed ^ it as u64)? {
            Decision::Infeasible(out) => return Ok((out, report)),
            Decision::Feasible { params, delta } => (params, delta),
        };
        let w = g.weights_at(&params);
        let slack = scan_slack(delta);
        let max_of = |set: &[EdgeId]| set.iter().map(|&e| w[e]).fold(f64::NEG_INFINITY, f64::max);
        let min_of = |set: &[EdgeId]| set.iter().map(|&e| w[e]).fold(f64::INFINITY, f64::min);
        let violated: Vec<usize> = (0..active.len())
            .filter(|&k| min_of(&fam.b[active[k]]) - max_of(&fam.a[active[k]]) < slack)
            .collect();
        if violated.is_empty() {
            return Ok((p.finish(params, delta), report));
        }

        let top_before = cost_a.iter().chain(&cost_b).flatten().copied().max().unwrap_or(0);
        let before = scaled_total(&cost_a, top_before) + scaled_total(&cost_b, top_before);
        for &k in &violated {
            let i = active[k];
            let (na, nb) = &nets[k];
            let a_net = max_of(na);
            let b_net = min_of(nb);
            for (j, &e) in fam.a[i].iter().enumerate() {
                if w[e] > a_net {
                    cost_a[k][j] += 1;
                }
            }
            for (j, &f) in fam.b[i].iter().enumerate() {
                if w[f] < b_net {
                    cost_b[k][j] += 1;
                }
            }
        }
        let after = scaled_total(&cost_a, top_before) + scaled_total(&cost_b, top_before);
        report.growth.push(after / before);
    }

    report.fallback = true;
    Ok((solve_naive(g, tree)?, report))
}
