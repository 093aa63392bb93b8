//! Linear programming in low, fixed dimension.
//!
//! [`lp_solve`] maximizes a linear objective over `a . x >= b` constraints
//! inside a box, breaking ties towards the lexicographically smallest
//! optimal point so every subset of constraints has a unique optimum. Results
//! carry a basis: at most `k` constraints that reproduce the optimum on their
//! own, or at most `k + 1` mutually inconsistent constraints.
//!
//! Strict systems `a . p > b` are decided by [`solve_strict`]: a margin
//! variable `delta` is appended, each strict row becomes `a . p - delta >= b`,
//! and the system is strictly feasible iff the maximal `delta` exceeds
//! [`DELTA_MIN`].

mod seidel;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::LpError;
use crate::graph::EdgeId;
use crate::scalar::Scalar;
use seidel::{Outcome, Rows};

/// Largest supported number of LP variables (eight parameters plus margin).
pub const MAX_DIM: usize = 9;

/// Margin separating "uniquely optimal" from "tied".
pub const DELTA_MIN: f64 = 1e-9;

/// Artificial bound substituted for a missing box side.
const FREE_BOUND: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    /// `normal . x >= rhs`
    Ge,
    /// `normal . x > rhs`
    Gt,
}

/// Where a constraint came from; opaque to the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    /// `(cost(other) - cost(tree)) . p > 0` for the swap `(tree, other)`.
    Swap { tree: EdgeId, other: EdgeId },
    /// Index into a caller-owned table of alternative subgraphs.
    Subgraph(usize),
    /// `cost(e) . p >= 0`.
    NonNegative(EdgeId),
    /// Anything else; the payload is caller-defined.
    Label(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub normal: Vec<f64>,
    pub rhs: f64,
    pub sense: Sense,
    pub origin: Origin,
}

impl LinearConstraint {
    pub fn new(normal: Vec<f64>, rhs: f64, sense: Sense, origin: Origin) -> Self {
        LinearConstraint {
            normal,
            rhs,
            sense,
            origin,
        }
    }

    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn is_zero_normal(&self) -> bool {
        self.normal.iter().all(|&a| a == 0.0)
    }

    /// True when the constraint holds for every `x`.
    pub fn is_vacuously_true(&self) -> bool {
        self.is_zero_normal()
            && match self.sense {
                Sense::Ge => self.rhs <= 0.0,
                Sense::Gt => self.rhs < 0.0,
            }
    }

    /// True when the constraint holds for no `x`.
    pub fn is_vacuously_false(&self) -> bool {
        self.is_zero_normal() && !self.is_vacuously_true()
    }
}

/// Per-coordinate bounds; `None` leaves that side open.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
}

impl Bounds {
    /// The normalization box `[-1, 1]^k`.
    pub fn unit(k: usize) -> Self {
        Bounds {
            lower: vec![Some(-1.0); k],
            upper: vec![Some(1.0); k],
        }
    }

    pub fn unbounded(k: usize) -> Self {
        Bounds {
            lower: vec![None; k],
            upper: vec![None; k],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    fn is_closed(&self) -> bool {
        self.lower.iter().chain(&self.upper).all(Option::is_some)
    }

    fn resolve(&self, free: f64) -> (Vec<f64>, Vec<f64>) {
        (
            self.lower.iter().map(|b| b.unwrap_or(-free)).collect(),
            self.upper.iter().map(|b| b.unwrap_or(free)).collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    pub point: Option<Vec<f64>>,
    pub objective_value: Option<f64>,
    /// Indices into the constraint slice handed to the solver.
    pub basis: Vec<usize>,
}

/// Result of the generic engine; bounds are always closed there.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactLp<S> {
    Optimal { point: Vec<S>, basis: Vec<usize> },
    Infeasible { basis: Vec<usize> },
}

/// Lexicographic objective list: the objective, then smallest coordinates.
fn lex_objectives<S: Scalar>(objective: &[S]) -> Vec<Vec<S>> {
    let k = objective.len();
    let mut objs = vec![objective.to_vec()];
    for i in 0..k {
        objs.push((0..k).map(|j| if i == j { -S::one() } else { S::zero() }).collect());
    }
    objs
}

/// Solves `max objective . x` s.t. `rows[i].0 . x >= rows[i].1`, `lo <= x <= hi`
/// in any scalar type. Constraint order is shuffled with `seed`.
pub fn lp_solve_in<S: Scalar>(rows: &[(Vec<S>, S)], objective: &[S], lo: &[S], hi: &[S], seed: u64) -> ExactLp<S> {
    let k = objective.len();
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut table = Rows::with_capacity(k, rows.len());
    for &i in &order {
        table.push(rows[i].0.iter().cloned(), rows[i].1.clone(), i as u32);
    }
    let basis_of = |ids: Vec<u32>| {
        let mut v: Vec<usize> = ids.into_iter().map(|i| i as usize).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    match seidel::solve(lo, hi, &lex_objectives(objective), &mut table) {
        Outcome::Optimal { x, basis } => ExactLp::Optimal {
            point: x,
            basis: basis_of(basis),
        },
        Outcome::Infeasible { cert } => ExactLp::Infeasible { basis: basis_of(cert) },
    }
}

fn check_dims(constraints: &[LinearConstraint], k: usize) -> Result<(), LpError> {
    if k == 0 {
        return Err(LpError::ZeroDimension);
    }
    if k > MAX_DIM {
        return Err(LpError::TooManyVariables(k));
    }
    for (index, c) in constraints.iter().enumerate() {
        if c.normal.len() != k {
            return Err(LpError::DimensionMismatch {
                index,
                expected: k,
                found: c.normal.len(),
            });
        }
    }
    Ok(())
}

/// Maximizes `objective . x` over the closed region (strict rows are read as
/// `>=`) intersected with `bounds`.
pub fn lp_solve(
    constraints: &[LinearConstraint],
    objective: &[f64],
    bounds: &Bounds,
    seed: u64,
) -> Result<LpResult, LpError> {
    let k = objective.len();
    check_dims(constraints, k)?;
    if bounds.dim() != k {
        return Err(LpError::DimensionMismatch {
            index: usize::MAX,
            expected: k,
            found: bounds.dim(),
        });
    }
    for i in 0..k {
        if let (Some(l), Some(u)) = (bounds.lower[i], bounds.upper[i]) {
            if !(l <= u) {
                return Err(LpError::InvalidBounds(i));
            }
        }
    }
    if let Some(i) = constraints
        .iter()
        .position(|c| c.is_zero_normal() && c.rhs > 0.0)
    {
        return Ok(LpResult {
            status: LpStatus::Infeasible,
            point: None,
            objective_value: None,
            basis: vec![i],
        });
    }
    let kept: Vec<usize> = (0..constraints.len())
        .filter(|&i| !constraints[i].is_zero_normal())
        .collect();
    let rows: Vec<(Vec<f64>, f64)> = kept
        .iter()
        .map(|&i| (constraints[i].normal.clone(), constraints[i].rhs))
        .collect();

    let (lo, hi) = bounds.resolve(FREE_BOUND);
    match lp_solve_in(&rows, objective, &lo, &hi, seed) {
        ExactLp::Infeasible { basis } => {
            let basis: Vec<usize> = basis.into_iter().map(|i| kept[i]).collect();
            let basis = prune_infeasible(constraints, &basis, bounds, seed);
            Ok(LpResult {
                status: LpStatus::Infeasible,
                point: None,
                objective_value: None,
                basis,
            })
        }
        ExactLp::Optimal { point, basis } => {
            let value: f64 = dot(objective, &point);
            if !bounds.is_closed() {
                let (lo2, hi2) = bounds.resolve(FREE_BOUND * 4.0);
                if let ExactLp::Optimal { point: wider, .. } = lp_solve_in(&rows, objective, &lo2, &hi2, seed) {
                    let wider_value = dot(objective, &wider);
                    if wider_value - value > 1e-6 * (1.0 + value.abs()) {
                        return Ok(LpResult {
                            status: LpStatus::Unbounded,
                            point: None,
                            objective_value: None,
                            basis: vec![],
                        });
                    }
                }
            }
            Ok(LpResult {
                status: LpStatus::Optimal,
                point: Some(point),
                objective_value: Some(value),
                basis: basis.into_iter().map(|i| kept[i]).collect(),
            })
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn is_feasible(constraints: &[LinearConstraint], subset: &[usize], bounds: &Bounds, seed: u64) -> bool {
    let rows: Vec<(Vec<f64>, f64)> = subset
        .iter()
        .map(|&i| (constraints[i].normal.clone(), constraints[i].rhs))
        .collect();
    let (lo, hi) = bounds.resolve(FREE_BOUND);
    let zero = vec![0.0; bounds.dim()];
    matches!(lp_solve_in(&rows, &zero, &lo, &hi, seed), ExactLp::Optimal { .. })
}

/// Drops members of an infeasible set while it stays infeasible.
fn prune_infeasible(constraints: &[LinearConstraint], basis: &[usize], bounds: &Bounds, seed: u64) -> Vec<usize> {
    let mut kept = basis.to_vec();
    let mut i = 0;
    while i < kept.len() && kept.len() > 1 {
        let mut trial = kept.clone();
        trial.remove(i);
        if !is_feasible(constraints, &trial, bounds, seed) {
            kept = trial;
        } else {
            i += 1;
        }
    }
    kept
}

/// Constraints violated at `point`: `a . x < b` for `>=` rows and
/// `a . x <= b + strictness` for strict rows.
pub fn violated_constraints(constraints: &[LinearConstraint], point: &[f64], strictness: f64) -> Vec<usize> {
    constraints
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            let v = c.value_at(point);
            match c.sense {
                Sense::Ge => v < c.rhs,
                Sense::Gt => v <= c.rhs + strictness,
            }
        })
        .map(|(i, _)| i)
        .collect()
}

/// Appends the margin coordinate: strict rows get `-1`, closed rows `0`.
pub fn margin_transform(constraints: &[LinearConstraint]) -> Vec<LinearConstraint> {
    constraints
        .iter()
        .map(|c| {
            let mut normal = c.normal.clone();
            normal.push(match c.sense {
                Sense::Gt => -1.0,
                Sense::Ge => 0.0,
            });
            LinearConstraint::new(normal, c.rhs, Sense::Ge, c.origin)
        })
        .collect()
}

/// Box of the margin LP: `p` in `[-1, 1]^d`, `delta` in `[-cap, cap]`.
pub fn margin_bounds(dim: usize, delta_cap: f64) -> Bounds {
    let mut b = Bounds::unit(dim + 1);
    b.lower[dim] = Some(-delta_cap);
    b.upper[dim] = Some(delta_cap);
    b
}

/// Outcome of deciding a system of strict (and closed) constraints.
#[derive(Debug, Clone, PartialEq)]
pub enum StrictOutcome {
    Feasible {
        params: Vec<f64>,
        delta: f64,
        basis: Vec<usize>,
    },
    /// `basis` alone admits no point with margin above [`DELTA_MIN`].
    Infeasible { basis: Vec<usize>, delta: Option<f64> },
}

impl StrictOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, StrictOutcome::Feasible { .. })
    }
}

/// Maximum margin and lexicographically smallest parameters of a strict
/// system over `p` in `[-1, 1]^dim`, `delta` in `[-delta_cap, delta_cap]`.
pub fn solve_strict(
    constraints: &[LinearConstraint],
    dim: usize,
    delta_cap: f64,
    seed: u64,
) -> Result<StrictOutcome, LpError> {
    check_dims(constraints, dim)?;
    if dim + 1 > MAX_DIM {
        return Err(LpError::TooManyVariables(dim + 1));
    }
    if let Some(i) = constraints.iter().position(LinearConstraint::is_vacuously_false) {
        return Ok(StrictOutcome::Infeasible {
            basis: vec![i],
            delta: None,
        });
    }
    let kept: Vec<usize> = (0..constraints.len())
        // a zero-normal strict row still caps the margin
        .filter(|&i| !(constraints[i].sense == Sense::Ge && constraints[i].is_vacuously_true()))
        .collect();
    let outcome = strict_core(constraints, &kept, dim, delta_cap, seed);
    match outcome {
        Core::Feasible { point, basis } => {
            let delta = point[dim];
            let mut params = point;
            params.truncate(dim);
            Ok(StrictOutcome::Feasible { params, delta, basis })
        }
        Core::Infeasible { basis, delta } => {
            let mut kept = basis;
            let mut i = 0;
            while i < kept.len() && kept.len() > 1 {
                let mut trial = kept.clone();
                trial.remove(i);
                if matches!(strict_core(constraints, &trial, dim, delta_cap, seed), Core::Infeasible { .. }) {
                    kept = trial;
                } else {
                    i += 1;
                }
            }
            Ok(StrictOutcome::Infeasible { basis: kept, delta })
        }
    }
}

enum Core {
    Feasible { point: Vec<f64>, basis: Vec<usize> },
    Infeasible { basis: Vec<usize>, delta: Option<f64> },
}

fn strict_core(constraints: &[LinearConstraint], subset: &[usize], dim: usize, delta_cap: f64, seed: u64) -> Core {
    let rows: Vec<(Vec<f64>, f64)> = subset
        .iter()
        .map(|&i| {
            let c = &constraints[i];
            let mut normal = c.normal.clone();
            normal.push(if c.sense == Sense::Gt { -1.0 } else { 0.0 });
            (normal, c.rhs)
        })
        .collect();
    let bounds = margin_bounds(dim, delta_cap);
    let (lo, hi) = bounds.resolve(FREE_BOUND);
    let mut objective = vec![0.0; dim + 1];
    objective[dim] = 1.0;
    match lp_solve_in(&rows, &objective, &lo, &hi, seed) {
        ExactLp::Optimal { point, basis } => {
            let basis = basis.into_iter().map(|i| subset[i]).collect();
            if point[dim] > DELTA_MIN {
                Core::Feasible { point, basis }
            } else {
                Core::Infeasible {
                    basis,
                    delta: Some(point[dim]),
                }
            }
        }
        ExactLp::Infeasible { basis } => Core::Infeasible {
            basis: basis.into_iter().map(|i| subset[i]).collect(),
            delta: None,
        },
    }
}

/// Exact-arithmetic counterpart of [`solve_strict`]: feasible iff the
/// maximal margin is positive.
pub fn solve_strict_exact<S: Scalar>(
    constraints: &[LinearConstraint],
    dim: usize,
    delta_cap: f64,
    seed: u64,
) -> Result<(bool, Vec<S>, Vec<usize>), LpError> {
    check_dims(constraints, dim)?;
    let rows: Vec<(Vec<S>, S)> = constraints
        .iter()
        .map(|c| {
            let mut normal: Vec<S> = c.normal.iter().map(|&a| S::from_f64(a)).collect();
            normal.push(if c.sense == Sense::Gt { -S::one() } else { S::zero() });
            (normal, S::from_f64(c.rhs))
        })
        .collect();
    let mut lo = vec![-S::one(); dim + 1];
    let mut hi = vec![S::one(); dim + 1];
    lo[dim] = S::from_f64(-delta_cap);
    hi[dim] = S::from_f64(delta_cap);
    let mut objective = vec![S::zero(); dim + 1];
    objective[dim] = S::one();
    match lp_solve_in(&rows, &objective, &lo, &hi, seed) {
        ExactLp::Optimal { point, basis } => {
            let feasible = point[dim] > S::zero();
            Ok((feasible, point, basis))
        }
        ExactLp::Infeasible { basis } => Ok((false, vec![], basis)),
    }
}

/// A valid margin cap for a graph whose constraint normals are signed sums
/// of distinct edge costs.
pub fn delta_cap_for(total_abs_cost: f64) -> f64 {
    1.0 + total_abs_cost
}
