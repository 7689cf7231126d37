//! In- and out-degree.
//!
//! Unweighted variants count distinct incident edges; weighted variants sum
//! the edge weights. Self-loops never count.

use super::{Metric, MetricVector};
use crate::graph::VdfGraph;

fn degree(g: &VdfGraph, weighted: bool, incoming: bool) -> Vec<f64> {
    let mut values = vec![0.0; g.node_count()];
    for e in g.edges().iter().filter(|e| !e.is_self_loop()) {
        let node = if incoming { e.to } else { e.from };
        values[node.index()] += if weighted { e.weight } else { 1.0 };
    }
    values
}

pub fn in_degree(g: &VdfGraph, weighted: bool) -> MetricVector {
    MetricVector::new(Metric::InDegree.as_str(), g, degree(g, weighted, true))
}

pub fn out_degree(g: &VdfGraph, weighted: bool) -> MetricVector {
    MetricVector::new(Metric::OutDegree.as_str(), g, degree(g, weighted, false))
}
