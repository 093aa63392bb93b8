//! Sliding-objective ellipsoid method over `(p, delta)` maximizing the
//! margin `delta`, driven by a strong separation oracle.
//!
//! Points outside the box are cut by the violated box face; inside the box
//! the oracle either cuts the center off or declares it feasible, in which
//! case the objective `delta >= delta_center` is imposed. The phase stops
//! once the ellipsoid is smaller than a ball of radius `DELTA_MIN / (L + 1)`.
//!
//! The collected cuts then seed a certification phase: the low-dimensional
//! LP over the cuts is solved, the oracle is asked at its optimum, and any
//! new cut is added until the oracle agrees. This turns the approximate
//! ellipsoid answer into an exact optimum and yields a minimal infeasible
//! subset of the cuts as the witness.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::EdgeId;
use crate::lp::{self, LinearConstraint, Origin, Sense, StrictOutcome, DELTA_MIN, MAX_DIM};
use crate::outcome::{SolveOutcome, WitnessEntry, WitnessKind};

#[derive(Debug, Clone, PartialEq)]
pub enum OracleReply {
    /// The target is optimal at the query point with margin `delta`.
    Solved { delta: f64 },
    /// The query point lies in the margin polyhedron.
    FeasibleHere,
    /// A halfspace (over `p`; `Sense::Gt` rows carry the margin) violated at
    /// the query point, with the subgraph it comes from.
    Cut {
        halfspace: LinearConstraint,
        subgraph: Vec<EdgeId>,
    },
}

pub trait SeparationOracle {
    fn dim(&self) -> usize;

    /// Largest constraint coefficient magnitude the oracle can produce.
    fn max_coefficient(&self) -> f64 {
        1.0
    }

    fn query(&mut self, p: &[f64], delta: f64) -> Result<OracleReply>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    pub center: Vec<f64>,
    pub shape: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutStep {
    /// The halfspace misses the ellipsoid.
    Empty,
    Shrunk { alpha: f64, volume_ratio: f64 },
}

impl Ellipsoid {
    /// Axis-aligned ellipsoid with the given semi-axes.
    pub fn ball(center: Vec<f64>, radii: &[f64]) -> Self {
        let k = radii.len();
        let mut shape = vec![vec![0.0; k]; k];
        for i in 0..k {
            shape[i][i] = radii[i] * radii[i];
        }
        Ellipsoid { center, shape }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn cholesky_log_det(&self) -> Option<f64> {
        let k = self.dim();
        let mut l = vec![vec![0.0; k]; k];
        let mut log_det = 0.0;
        for i in 0..k {
            for j in 0..=i {
                let s: f64 = self.shape[i][j] - (0..j).map(|t| l[i][t] * l[j][t]).sum::<f64>();
                if i == j {
                    if !(s > 0.0) || !s.is_finite() {
                        return None;
                    }
                    l[i][i] = s.sqrt();
                    log_det += s.ln();
                } else {
                    l[i][j] = s / l[j][j];
                }
            }
        }
        Some(log_det)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.cholesky_log_det().is_some()
    }

    /// Log of the volume relative to the unit ball; `None` once the shape
    /// is no longer positive-definite.
    pub fn log_volume(&self) -> Option<f64> {
        self.cholesky_log_det().map(|d| 0.5 * d)
    }

    /// Replaces the ellipsoid by the smallest one containing its
    /// intersection with `a . x <= b` (deep cut).
    pub fn cut(&mut self, a: &[f64], b: f64) -> CutStep {
        let k = self.dim() as f64;
        let qa: Vec<f64> = self.shape.iter().map(|row| row.iter().zip(a).map(|(q, x)| q * x).sum()).collect();
        let aqa: f64 = qa.iter().zip(a).map(|(q, x)| q * x).sum();
        if !(aqa > 0.0) {
            return CutStep::Empty;
        }
        let norm = aqa.sqrt();
        let ac: f64 = a.iter().zip(&self.center).map(|(x, c)| x * c).sum();
        let alpha = (ac - b) / norm;
        if alpha >= 1.0 {
            return CutStep::Empty;
        }
        let alpha = alpha.max(-1.0 / k);
        let bvec: Vec<f64> = qa.iter().map(|q| q / norm).collect();
        let tau = (1.0 + k * alpha) / (k + 1.0);
        let sigma = 2.0 * (1.0 + k * alpha) / ((k + 1.0) * (1.0 + alpha));
        let gamma = k * k * (1.0 - alpha * alpha) / (k * k - 1.0);
        for (c, bi) in self.center.iter_mut().zip(&bvec) {
            *c -= tau * bi;
        }
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                self.shape[i][j] = gamma * (self.shape[i][j] - sigma * bvec[i] * bvec[j]);
            }
        }
        for i in 0..n {
            for j in 0..i {
                let s = 0.5 * (self.shape[i][j] + self.shape[j][i]);
                self.shape[i][j] = s;
                self.shape[j][i] = s;
            }
        }
        let volume_ratio = (gamma.powf(k) * (1.0 - sigma)).sqrt();
        CutStep::Shrunk { alpha, volume_ratio }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidOptions {
    /// Total oracle rounds (ellipsoid plus certification) before giving up.
    pub max_iters: Option<usize>,
    /// Bound on `|delta|`; see `lp::delta_cap_for`.
    pub delta_cap: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EllipsoidReport {
    pub iterations: usize,
    pub certification_rounds: usize,
    pub restarts: usize,
    pub cuts: usize,
    /// Largest per-step volume ratio seen.
    pub max_volume_ratio: f64,
    pub best_delta: Option<f64>,
    pub early_exit: bool,
}

const MAX_RESTARTS: usize = 3;

pub fn default_max_iters(d: usize) -> usize {
    let d = d.max(1) as f64;
    (50.0 * d * d * (1.0 / DELTA_MIN).ln()).ceil() as usize
}

struct CutStore {
    rows: Vec<LinearConstraint>,
    subgraphs: Vec<Vec<EdgeId>>,
    seen: HashSet<(bool, Vec<EdgeId>)>,
}

impl CutStore {
    fn key(h: &LinearConstraint, subgraph: &[EdgeId]) -> (bool, Vec<EdgeId>) {
        let mut edges = subgraph.to_vec();
        edges.sort_unstable();
        (matches!(h.origin, Origin::NonNegative(_)), edges)
    }

    /// False if an identical cut was stored before.
    fn push(&mut self, h: LinearConstraint, subgraph: Vec<EdgeId>) -> bool {
        if !self.seen.insert(Self::key(&h, &subgraph)) {
            return false;
        }
        self.rows.push(h);
        self.subgraphs.push(subgraph);
        true
    }

    fn entry(&self, i: usize) -> WitnessEntry {
        let mut edges = self.subgraphs[i].clone();
        edges.sort_unstable();
        WitnessEntry {
            kind: match self.rows[i].origin {
                Origin::NonNegative(_) => WitnessKind::NonNegative,
                _ => WitnessKind::Subgraph,
            },
            edges,
            constraint: self.rows[i].clone(),
        }
    }
}

fn margin_row(h: &LinearConstraint) -> Vec<f64> {
    let mut row = h.normal.clone();
    row.push(if h.sense == Sense::Gt { -1.0 } else { 0.0 });
    row
}

fn indeterminate(iterations: usize, best: &Option<(Vec<f64>, f64)>) -> Error {
    Error::Indeterminate {
        iterations,
        best_point: best.as_ref().map(|b| b.0.clone()),
        best_delta: best.as_ref().map(|b| b.1),
    }
}

/// Maximizes `delta` over `p` in `[-1, 1]^d` subject to the oracle's
/// polyhedron. Feasible iff the optimum exceeds `DELTA_MIN` (or the oracle
/// reports `Solved`); otherwise the witness lists at most `d + 1` cuts that
/// are jointly infeasible.
pub fn ellipsoid_maximize_delta(
    oracle: &mut dyn SeparationOracle,
    opts: &EllipsoidOptions,
) -> Result<(SolveOutcome, EllipsoidReport)> {
    let d = oracle.dim();
    if d == 0 || d > 64 {
        return Err(Error::Contract(format!("ellipsoid dimension must lie in 1..=64, got {d}")));
    }
    let k = d + 1;
    let cap = opts.delta_cap;
    let max_iters = opts.max_iters.unwrap_or_else(|| default_max_iters(d));
    let mut report = EllipsoidReport::default();
    let mut store = CutStore {
        rows: vec![],
        subgraphs: vec![],
        seen: HashSet::new(),
    };
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut coef = oracle.max_coefficient().max(1.0);
    let bound = |i: usize| if i < d { 1.0 } else { cap };
    let radii: Vec<f64> = (0..k).map(|i| (k as f64).sqrt() * bound(i)).collect();
    let mut ell = Ellipsoid::ball(vec![0.0; k], &radii);
    let mut rounds = 0;

    loop {
        let Some(log_vol) = ell.log_volume() else {
            report.restarts += 1;
            if report.restarts > MAX_RESTARTS {
                break;
            }
            let center = best.as_ref().map_or(vec![0.0; k], |(p, delta)| {
                let mut c = p.clone();
                c.push(*delta);
                c
            });
            ell = Ellipsoid::ball(center, &radii);
            continue;
        };
        if log_vol < k as f64 * (DELTA_MIN / (coef + 1.0)).ln() {
            break;
        }
        // Every point still in play has delta inside center +- radius; once
        // that range is tiny or below the threshold the LP phase takes over.
        let radius = ell.shape[d][d].max(0.0).sqrt();
        if ell.center[d] + radius <= DELTA_MIN || radius <= DELTA_MIN * 1e-3 {
            break;
        }
        if rounds >= max_iters {
            return Err(indeterminate(rounds, &best));
        }
        rounds += 1;
        let c = ell.center.clone();
        let mut a = vec![0.0; k];
        let b;
        if let Some(i) = (0..k).find(|&i| c[i].abs() > bound(i)) {
            a[i] = c[i].signum();
            b = bound(i);
        } else {
            match oracle.query(&c[..d], c[d])? {
                OracleReply::Solved { delta } => {
                    report.iterations = rounds;
                    report.early_exit = true;
                    report.best_delta = Some(delta);
                    report.cuts = store.rows.len();
                    return Ok((SolveOutcome::feasible(c[..d].to_vec(), delta), report));
                }
                OracleReply::FeasibleHere => {
                    if best.as_ref().map_or(true, |(_, bd)| c[d] > *bd) {
                        best = Some((c[..d].to_vec(), c[d]));
                    }
                    a[d] = -1.0;
                    b = -best.as_ref().expect("just set").1;
                }
                OracleReply::Cut { halfspace, subgraph } => {
                    let row = margin_row(&halfspace);
                    let value: f64 = row.iter().zip(&c).map(|(x, y)| x * y).sum();
                    let scale: f64 = row.iter().zip(&c).map(|(x, y)| (x * y).abs()).sum::<f64>() + halfspace.rhs.abs();
                    if value > halfspace.rhs + 1e-9 * (1.0 + scale) {
                        return Err(Error::Contract("oracle cut does not exclude the query point".into()));
                    }
                    coef = row.iter().fold(coef, |m, x| m.max(x.abs()));
                    a = row.iter().map(|x| -x).collect();
                    b = -halfspace.rhs;
                    store.push(halfspace, subgraph);
                }
            }
        }
        match ell.cut(&a, b) {
            CutStep::Empty => break,
            // at the limit of floating point the center stops moving
            CutStep::Shrunk { .. } if ell.center == c => break,
            CutStep::Shrunk { volume_ratio, .. } => {
                report.max_volume_ratio = report.max_volume_ratio.max(volume_ratio);
            }
        }
    }
    report.iterations = rounds;
    report.best_delta = best.as_ref().map(|b| b.1);

    if k > MAX_DIM {
        report.cuts = store.rows.len();
        // no exact LP in this dimension: report the ellipsoid's answer
        return Ok(match best {
            Some((p, delta)) if delta > DELTA_MIN => (SolveOutcome::feasible(p, delta), report),
            _ => {
                let first = store.rows.len().saturating_sub(k);
                let witness = (first..store.rows.len()).map(|i| store.entry(i)).collect();
                (SolveOutcome::infeasible(witness), report)
            }
        });
    }

    loop {
        if rounds >= max_iters {
            return Err(indeterminate(rounds, &best));
        }
        rounds += 1;
        report.certification_rounds += 1;
        match lp::solve_strict(&store.rows, d, cap, opts.seed)? {
            StrictOutcome::Infeasible { basis, .. } => {
                report.iterations = rounds;
                report.cuts = store.rows.len();
                let witness = basis.iter().map(|&i| store.entry(i)).collect();
                return Ok((SolveOutcome::infeasible(witness), report));
            }
            StrictOutcome::Feasible { params, delta, .. } => {
                let reply = oracle.query(&params, delta)?;
                let done = match reply {
                    OracleReply::Solved { delta: gap } => Some(gap),
                    OracleReply::FeasibleHere => Some(delta),
                    OracleReply::Cut { halfspace, subgraph } => {
                        let margin = halfspace.value_at(&params) - halfspace.rhs;
                        if store.push(halfspace, subgraph) {
                            None
                        } else if margin.min(delta) > DELTA_MIN {
                            // repeated cut: the LP already satisfies it up to rounding
                            Some(margin.min(delta))
                        } else {
                            return Err(indeterminate(rounds, &Some((params, delta))));
                        }
                    }
                };
                if let Some(delta) = done {
                    report.iterations = rounds;
                    report.cuts = store.rows.len();
                    report.best_delta = Some(delta);
                    return Ok((SolveOutcome::feasible(params, delta), report));
                }
            }
        }
    }
}
