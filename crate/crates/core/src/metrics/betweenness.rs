//! Betweenness centrality (Brandes).
//!
//! ```text
//! C_B(v) = Σ_{s≠v≠t} σ_st(v) / σ_st
//! ```
//!
//! Shortest paths are counted in hops: edge weights describe traffic volume,
//! not distance. Scores are left un-normalized, so a node brokering every
//! path in a star reports the plain pair count. Self-loops are ignored.

use std::collections::VecDeque;

use super::{Metric, MetricVector};
use crate::graph::VdfGraph;

/// Out-neighbour lists with self-loops removed.
fn successors(g: &VdfGraph) -> Vec<Vec<usize>> {
    let mut succ = vec![Vec::new(); g.node_count()];
    for e in g.edges().iter().filter(|e| !e.is_self_loop()) {
        succ[e.from.index()].push(e.to.index());
    }
    succ
}

pub fn betweenness(g: &VdfGraph) -> MetricVector {
    let n = g.node_count();
    let succ = successors(g);
    let mut centrality = vec![0.0_f64; n];

    let mut dist = vec![-1_i64; n];
    let mut sigma = vec![0.0_f64; n];
    let mut delta = vec![0.0_f64; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        dist.fill(-1);
        sigma.fill(0.0);
        delta.fill(0.0);
        preds.iter_mut().for_each(Vec::clear);
        order.clear();

        dist[s] = 0;
        sigma[s] = 1.0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &succ[v] {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }

        // Dependencies accumulate back from the farthest nodes.
        for &w in order.iter().rev() {
            let coeff = (1.0 + delta[w]) / sigma[w];
            for &v in &preds[w] {
                delta[v] += sigma[v] * coeff;
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }

    MetricVector::new(Metric::Betweenness.as_str(), g, centrality)
}
