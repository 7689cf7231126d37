use std::fmt::Write;

use super::scale_into;
use crate::error::{Error, Result};
use crate::graph::VdfGraph;
use crate::metrics::MetricVector;

pub const MIN_NODE_SIZE: f64 = 0.5;
pub const MAX_NODE_SIZE: f64 = 3.0;
pub const MIN_PEN_WIDTH: f64 = 1.0;
pub const MAX_PEN_WIDTH: f64 = 5.0;

pub(crate) fn quote(id: &str) -> String {
    let mut out = String::with_capacity(id.len() + 2);
    out.push('"');
    for c in id.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// DOT digraph with node size scaled from `size_by` into
/// `[0.5, 3.0]` and pen width scaled from edge weight into `[1, 5]`.
pub fn export_dot(g: &VdfGraph, metrics: &[MetricVector], size_by: &str) -> Result<Vec<u8>> {
    let metric = metrics
        .iter()
        .find(|m| m.name == size_by)
        .ok_or_else(|| Error::validation(format!("unknown metric {size_by:?} for node sizing")))?;
    let raw: Vec<f64> = g
        .files()
        .iter()
        .map(|f| metric.value_of(f).unwrap_or(0.0))
        .collect();
    let sizes = scale_into(&raw, MIN_NODE_SIZE, MAX_NODE_SIZE);
    let weights: Vec<f64> = g.edges().iter().map(|e| e.weight).collect();
    let pens = scale_into(&weights, MIN_PEN_WIDTH, MAX_PEN_WIDTH);

    let mut s = String::new();
    s.push_str("digraph vdf {\n");
    s.push_str("  node [shape=circle, fixedsize=true];\n");
    for v in g.nodes() {
        let size = sizes[v.index()];
        let _ = writeln!(
            s,
            "  {} [width={size:.4}, height={size:.4}, label={}];",
            quote(g.file(v)),
            quote(g.file(v))
        );
    }
    for (e, pen) in g.edges().iter().zip(&pens) {
        let _ = writeln!(
            s,
            "  {} -> {} [penwidth={pen:.4}, weight={}];",
            quote(g.file(e.from)),
            quote(g.file(e.to)),
            super::format_number(e.weight)
        );
    }
    s.push_str("}\n");
    Ok(s.into_bytes())
}
