//! Newman modularity on the undirected weighted projection.
//!
//! ```text
//! Q = 1/(2m) Σ_vw [A'_vw − k_v k_w / (2m)] δ(c_v, c_w)
//! ```
//!
//! `A'_vw = w(v→w) + w(w→v)` with self-loops dropped, `k_v` the weighted
//! projection degree and `2m = Σ_v k_v`.

use crate::error::{Error, Result};
use crate::graph::{NodeId, VdfGraph};

/// Community label per node, checked to be a partition of all nodes.
pub(crate) fn labels(g: &VdfGraph, partition: &[Vec<NodeId>]) -> Result<Vec<usize>> {
    let n = g.node_count();
    let mut label = vec![usize::MAX; n];
    for (c, members) in partition.iter().enumerate() {
        for v in members {
            if v.index() >= n {
                return Err(Error::validation(format!("node {} is not in the graph", v.index())));
            }
            if label[v.index()] != usize::MAX {
                return Err(Error::validation(format!(
                    "{} appears in more than one community",
                    g.file(*v)
                )));
            }
            label[v.index()] = c;
        }
    }
    if let Some(v) = label.iter().position(|&l| l == usize::MAX) {
        return Err(Error::validation(format!(
            "{} is not assigned to any community",
            g.file(NodeId(v))
        )));
    }
    Ok(label)
}

pub fn modularity_q(g: &VdfGraph, partition: &[Vec<NodeId>]) -> Result<f64> {
    let label = labels(g, partition)?;
    Ok(modularity_from_labels(g, &label, partition.len()))
}

pub(crate) fn modularity_from_labels(g: &VdfGraph, label: &[usize], communities: usize) -> f64 {
    let mut internal = vec![0.0; communities];
    let mut total = vec![0.0; communities];
    let mut two_m = 0.0;
    for e in g.edges().iter().filter(|e| !e.is_self_loop()) {
        let (a, b) = (label[e.from.index()], label[e.to.index()]);
        // Each directed edge contributes to A'_ab and A'_ba.
        two_m += 2.0 * e.weight;
        total[a] += e.weight;
        total[b] += e.weight;
        if a == b {
            internal[a] += 2.0 * e.weight;
        }
    }
    if two_m <= 0.0 {
        return 0.0;
    }
    internal
        .iter()
        .zip(&total)
        .map(|(inside, tot)| inside / two_m - (tot / two_m).powi(2))
        .sum()
}
