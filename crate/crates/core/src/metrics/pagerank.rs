//! Weighted PageRank.
//!
//! Each file passes `d · PR(v)` to its successors in proportion to edge
//! weight and keeps the remaining `1 − d` spread uniformly. Files without
//! outgoing flow (self-loops do not count) redistribute their whole mass
//! uniformly, so the scores always sum to one.

use super::{Metric, MetricVector};
use crate::graph::VdfGraph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankConfig {
    pub damping: f64,
    /// Convergence threshold on the L1 change between iterations.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            damping: 0.85,
            tol: 1e-12,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRankResult {
    pub vector: MetricVector,
    pub damping: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn pagerank(g: &VdfGraph, config: &PageRankConfig) -> PageRankResult {
    let d = config.damping;
    assert!(d > 0.0 && d < 1.0, "damping must lie in (0, 1)");
    let n = g.node_count();
    if n == 0 {
        return PageRankResult {
            vector: MetricVector::new(Metric::PageRank.as_str(), g, Vec::new()),
            damping: d,
            iterations: 0,
            converged: true,
        };
    }

    let links: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .filter(|e| !e.is_self_loop() && e.weight > 0.0)
        .map(|e| (e.from.index(), e.to.index(), e.weight))
        .collect();
    let mut out_weight = vec![0.0; n];
    for &(v, _, w) in &links {
        out_weight[v] += w;
    }
    let dangling: Vec<usize> = (0..n).filter(|&v| out_weight[v] == 0.0).collect();

    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iter {
        iterations += 1;
        let dangling_mass: f64 = dangling.iter().map(|&v| rank[v]).sum();
        next.fill((1.0 - d) / nf + d * dangling_mass / nf);
        for &(v, u, w) in &links {
            next[u] += d * rank[v] * w / out_weight[v];
        }
        let change: f64 = next.iter().zip(&rank).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if change < config.tol {
            converged = true;
            break;
        }
    }

    PageRankResult {
        vector: MetricVector::new(Metric::PageRank.as_str(), g, rank),
        damping: d,
        iterations,
        converged,
    }
}
