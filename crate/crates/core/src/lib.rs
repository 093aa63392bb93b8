//! Inverse parametric optimization on graphs.
//!
//! Edge weights are linear in an unknown parameter vector `p`; given a
//! desired spanning tree, shortest path or perfect matching, the solvers
//! here find `p` making it the unique optimum, or return a small set of
//! alternative subgraphs proving that no such `p` exists.

pub mod ellipsoid;
pub mod error;
pub mod graph;
pub mod harness;
pub mod inverse;
pub mod io;
pub mod lp;
pub mod mst;
pub mod oracles;
pub mod outcome;
pub mod scalar;
pub mod tree;

pub use error::{Error, GraphError, LpError, OracleError, Result};
pub use graph::{
    edge_weight, subgraph_weight, CostVector, Edge, EdgeId, Instance, ParamGraph, ParamVector, TargetKind,
    TargetSubgraph,
};
pub use io::{parse_instance, serialize_instance};
pub use lp::{lp_solve, violated_constraints, Bounds, LinearConstraint, LpResult, LpStatus, Origin, Sense, DELTA_MIN};
pub use outcome::{SolveOutcome, Status, WitnessEntry, WitnessKind};
pub use ellipsoid::{ellipsoid_maximize_delta, EllipsoidOptions, OracleReply, SeparationOracle};
pub use inverse::{solve_inverse, SolveOptions};
