//! Instance files: UTF-8 JSON, edge order in the file defines edge ids.
//!
//! ```json
//! {"num_vertices": 3, "dimension": 2, "nonneg_weights": false,
//!  "edges": [{"u": 0, "v": 1, "cost": [1.0, 0.0]}, ...],
//!  "target": {"kind": "spanning_tree", "edges": [0, 1]}}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::{validate_target, Instance, ParamGraph, TargetKind, TargetSubgraph};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    num_vertices: usize,
    dimension: usize,
    #[serde(default)]
    nonneg_weights: bool,
    edges: Vec<RawEdge>,
    target: RawTarget,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    u: usize,
    v: usize,
    cost: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTarget {
    kind: String,
    edges: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dest: Option<usize>,
}

fn field(field: impl Into<String>, message: impl Into<String>) -> GraphError {
    GraphError::Field {
        field: field.into(),
        message: message.into(),
    }
}

/// Parses and validates an instance.
pub fn parse_instance(text: &str) -> Result<Instance, GraphError> {
    let raw: RawInstance = serde_json::from_str(text).map_err(|e| GraphError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if raw.num_vertices == 0 {
        return Err(field("num_vertices", "must be at least 1"));
    }
    if raw.dimension == 0 {
        return Err(field("dimension", "must be at least 1"));
    }
    let mut graph = ParamGraph::new(raw.num_vertices, raw.dimension)?;
    for (i, e) in raw.edges.into_iter().enumerate() {
        if e.cost.len() != raw.dimension {
            return Err(field(
                format!("edges[{i}].cost"),
                format!("expected {} coefficients, found {}", raw.dimension, e.cost.len()),
            ));
        }
        for (name, vertex) in [("u", e.u), ("v", e.v)] {
            if vertex >= raw.num_vertices {
                return Err(field(
                    format!("edges[{i}].{name}"),
                    format!("vertex {vertex} out of range for {} vertices", raw.num_vertices),
                ));
            }
        }
        graph.add_edge(e.u, e.v, e.cost)?;
    }
    let kind = match raw.target.kind.as_str() {
        "spanning_tree" => TargetKind::SpanningTree,
        "perfect_matching" => TargetKind::PerfectMatching,
        "st_path" => {
            let source = raw
                .target
                .source
                .ok_or_else(|| field("target.source", "required for st_path"))?;
            let dest = raw
                .target
                .dest
                .ok_or_else(|| field("target.dest", "required for st_path"))?;
            TargetKind::StPath { source, dest }
        }
        other => return Err(field("target.kind", format!("unknown kind `{other}`"))),
    };
    let target = TargetSubgraph::new(kind, raw.target.edges);
    validate_target(&graph, &target)?;
    Ok(Instance {
        graph,
        target,
        nonneg_weights: raw.nonneg_weights,
    })
}

/// Pretty-printed JSON; stable byte-for-byte for equal instances.
pub fn serialize_instance(instance: &Instance) -> String {
    let g = &instance.graph;
    let (source, dest) = match instance.target.kind {
        TargetKind::StPath { source, dest } => (Some(source), Some(dest)),
        _ => (None, None),
    };
    let raw = RawInstance {
        num_vertices: g.num_vertices(),
        dimension: g.dimension(),
        nonneg_weights: instance.nonneg_weights,
        edges: g
            .edges()
            .iter()
            .map(|e| RawEdge {
                u: e.u,
                v: e.v,
                cost: e.cost.0.clone(),
            })
            .collect(),
        target: RawTarget {
            kind: instance.target.kind.name().to_string(),
            edges: instance.target.edges.clone(),
            source,
            dest,
        },
    };
    let mut text = serde_json::to_string_pretty(&raw).expect("instance serializes");
    text.push('\n');
    text
}
