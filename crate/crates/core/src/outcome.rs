//! Result type shared by every inverse solver.

use serde_json::{json, Value};

use crate::graph::EdgeId;
use crate::lp::LinearConstraint;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// An alternative suitable subgraph.
    Subgraph,
    /// A single edge whose weight must stay nonnegative.
    NonNegative,
}

/// One member of an infeasibility certificate: an alternative subgraph
/// together with the constraint `w(Y) - w(X) > 0` it contributes.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessEntry {
    pub kind: WitnessKind,
    pub edges: Vec<EdgeId>,
    pub constraint: LinearConstraint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: Status,
    pub params: Option<Vec<f64>>,
    pub delta: Option<f64>,
    pub witness: Vec<WitnessEntry>,
}

impl SolveOutcome {
    pub fn feasible(params: Vec<f64>, delta: f64) -> Self {
        SolveOutcome {
            status: Status::Feasible,
            params: Some(params),
            delta: Some(delta),
            witness: vec![],
        }
    }

    pub fn infeasible(witness: Vec<WitnessEntry>) -> Self {
        SolveOutcome {
            status: Status::Infeasible,
            params: None,
            delta: None,
            witness,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == Status::Feasible
    }

    /// Constraints of the witness, ready for re-checking with the LP.
    pub fn witness_constraints(&self) -> Vec<LinearConstraint> {
        self.witness.iter().map(|w| w.constraint.clone()).collect()
    }

    pub fn to_json(&self) -> Value {
        match self.status {
            Status::Feasible => json!({
                "status": "feasible",
                "params": self.params.clone().unwrap_or_default(),
                "delta": self.delta,
            }),
            Status::Infeasible => {
                let witness: Vec<Value> = self
                    .witness
                    .iter()
                    .map(|w| match w.kind {
                        WitnessKind::Subgraph => json!({ "edges": w.edges }),
                        WitnessKind::NonNegative => json!({ "edges": w.edges, "kind": "nonnegative" }),
                    })
                    .collect();
                json!({ "status": "infeasible", "witness": witness })
            }
        }
    }
}
