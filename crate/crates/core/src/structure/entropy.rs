//! Shannon entropy of taint-flow distributions, in bits.

use std::fmt;

use serde::Serialize;

use crate::graph::{NodeId, VdfGraph};

fn shannon_bits(weights: impl Iterator<Item = f64> + Clone) -> f64 {
    let total: f64 = weights.clone().sum();
    if total <= 0.0 {
        return 0.0;
    }
    -weights
        .filter(|&w| w > 0.0)
        .map(|w| {
            let p = w / total;
            p * p.log2()
        })
        .sum::<f64>()
}

/// Entropy of the out-flow distribution of `v`; self-loops excluded.
pub fn node_entropy(g: &VdfGraph, v: NodeId) -> f64 {
    let weights: Vec<f64> = g
        .out_edges(v)
        .filter(|e| !e.is_self_loop())
        .map(|e| e.weight)
        .collect();
    shannon_bits(weights.iter().copied())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyBand {
    Low,
    Moderate,
    High,
    VeryHigh,
}

impl EntropyBand {
    /// Closed upper bounds: 0.25 is still low, 0.5 moderate, 0.75 high.
    pub fn classify(normalized: f64) -> Self {
        if normalized <= 0.25 {
            EntropyBand::Low
        } else if normalized <= 0.5 {
            EntropyBand::Moderate
        } else if normalized <= 0.75 {
            EntropyBand::High
        } else {
            EntropyBand::VeryHigh
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EntropyBand::Low => "low",
            EntropyBand::Moderate => "moderate",
            EntropyBand::High => "high",
            EntropyBand::VeryHigh => "very_high",
        }
    }
}

impl fmt::Display for EntropyBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentReport {
    /// Member files, sorted.
    pub files: Vec<String>,
    pub edge_count: usize,
    pub entropy_bits: f64,
    pub max_entropy_bits: f64,
    pub normalized: f64,
    pub band: EntropyBand,
}

/// Entropy of the flow-weight distribution over the edges inside
/// `segment` (self-loops excluded), normalized by `log2 |E_S|`.
pub fn segment_entropy(g: &VdfGraph, segment: &[NodeId]) -> SegmentReport {
    let mut member = vec![false; g.node_count()];
    for v in segment {
        member[v.index()] = true;
    }
    let weights: Vec<f64> = g
        .edges()
        .iter()
        .filter(|e| !e.is_self_loop() && member[e.from.index()] && member[e.to.index()])
        .map(|e| e.weight)
        .collect();
    let edge_count = weights.len();
    let entropy_bits = shannon_bits(weights.iter().copied());
    let max_entropy_bits = if edge_count > 1 {
        (edge_count as f64).log2()
    } else {
        0.0
    };
    let normalized = if edge_count > 1 {
        (entropy_bits / max_entropy_bits).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut files: Vec<String> = segment.iter().map(|v| g.file(*v).to_string()).collect();
    files.sort();
    SegmentReport {
        files,
        edge_count,
        entropy_bits,
        max_entropy_bits,
        normalized,
        band: EntropyBand::classify(normalized),
    }
}
